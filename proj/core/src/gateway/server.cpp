#include "wpsenv/gateway/server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <random>
#include <thread>

#include "wpsenv/chaining.hpp"
#include "wpsenv/error.hpp"
#include "wpsenv/script/scenario.hpp"
#include "wpsenv/time.hpp"
#include "wpsenv/wps/codec.hpp"

namespace wpsenv::gateway {

using nlohmann::json;
namespace fs = std::filesystem;

TokenTable load_tokens(const fs::path& users_json) {
  TokenTable out;
  std::ifstream in(users_json);
  if (!in) return out;
  try {
    json doc = json::parse(in);
    for (const auto& [token, user] : doc.at("tokens").items()) {
      auto name = user.get<std::string>();
      store::Datastore::check_user(name);
      if (name == kWpsUser) throw ValidationError("user name " + name + " is reserved");
      out[token] = name;
    }
  } catch (const json::exception& e) {
    throw ValidationError("malformed " + users_json.string() + ": " + e.what());
  }
  return out;
}

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kXml = "text/xml; charset=utf-8";

struct HttpError {
  int status;
  json body;
};

int status_for(const Error& e) {
  if (dynamic_cast<const catalog::DuplicateWrapper*>(&e)) return 409;
  switch (e.code()) {
    case ErrorCode::Validation:
    case ErrorCode::Script:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::Precondition: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Gone: return 410;
    case ErrorCode::QuotaExceeded: return 413;
    case ErrorCode::IllegalState:
    case ErrorCode::Conflict:
    case ErrorCode::Cancelled: return 409;
    case ErrorCode::Protocol:
    case ErrorCode::Network:
    case ErrorCode::RemoteFault: return 502;
    case ErrorCode::Timeout: return 504;
  }
  return 500;
}

json error_body(const Error& e) {
  json body{{"error", to_string(e.code())}, {"widget", ""}, {"reason", e.what()}};
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    body["widget"] = v->widget();
    body["reason"] = v->reason();
  }
  if (const auto* s = dynamic_cast<const script::ScriptError*>(&e)) {
    body["reason"] = s->message();
    body["line"] = s->pos().line;
    body["col"] = s->pos().col;
  }
  if (dynamic_cast<const catalog::DuplicateWrapper*>(&e)) body["error"] = "duplicate_wrapper";
  return body;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& reason) {
  send_json(res, status, json{{"error", code}, {"widget", ""}, {"reason", reason}});
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("request body is not JSON: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError(std::string("missing field ") + name);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field ") + name + " has the wrong type");
  }
}

std::string random_id(const char* prefix) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static const char* hex = "0123456789abcdef";
  std::string out = prefix;
  auto v = rng();
  for (int i = 0; i < 16; ++i, v >>= 4) out += hex[v & 15];
  return out;
}

/// OWS KVP parameter names are case-insensitive.
std::optional<std::string> kvp(const httplib::Request& req, std::string_view name) {
  for (const auto& [k, v] : req.params) {
    if (k.size() != name.size()) continue;
    bool eq = true;
    for (size_t i = 0; i < k.size() && eq; ++i)
      eq = std::tolower(static_cast<unsigned char>(k[i])) == std::tolower(static_cast<unsigned char>(name[i]));
    if (eq) return v;
  }
  return std::nullopt;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  return true;
}

json param_decl_json(const wps::ParamDecl& d, bool output) {
  json j = d;
  j["suggested_widget"] = catalog::to_string(catalog::default_widget(d.dtype, output));
  return j;
}

json slot_json(const chaining::TypedSlot& s) {
  return json{{"service", s.owner_process}, {"param_id", s.param_id}, {"dtype", s.dtype}};
}

}  // namespace

struct Gateway::Impl {
  Environment& env;
  TokenTable tokens;
  httplib::Server server;
  std::thread thread;

  struct Draft {
    std::string user;
    catalog::RegistrationDraft draft;
  };
  std::mutex drafts_mutex;
  std::map<std::string, Draft> drafts;

  Impl(Environment& e, TokenTable t, std::size_t threads) : env(e), tokens(std::move(t)) {
    server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    server.set_payload_max_length(512ull * 1024 * 1024);
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
      send_error(res, 500, "internal", "internal error");
    });
    routes();
  }

  std::string base() const { return env.config().base_url(); }

  // -------------------------------------------------------------------------
  // wrappers

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;
  using UserHandler = std::function<void(const httplib::Request&, httplib::Response&, const std::string& user)>;

  /// REST: bearer auth plus uniform JSON errors.
  Handler rest(UserHandler h) {
    return [this, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      auto auth = req.get_header_value("Authorization");
      const std::string prefix = "Bearer ";
      auto it = auth.rfind(prefix, 0) == 0 ? tokens.find(auth.substr(prefix.size())) : tokens.end();
      if (it == tokens.end()) {
        res.set_header("WWW-Authenticate", "Bearer");
        send_error(res, 401, "unauthorized", "missing or unknown bearer token");
        return;
      }
      try {
        h(req, res, it->second);
      } catch (const Error& e) {
        send_json(res, status_for(e), error_body(e));
      } catch (const std::exception& e) {
        spdlog::error("unhandled error on {} {}: {}", req.method, req.path, e.what());
        send_error(res, 500, "internal", "internal error");
      }
    };
  }

  static void wps_exception(httplib::Response& res, int status, std::string code, std::string text,
                            std::optional<std::string> locator = std::nullopt) {
    res.status = status;
    res.set_content(wps::encode_exception_report({std::move(code), std::move(text), std::move(locator)}), kXml);
  }

  /// WPS: exception reports instead of JSON.
  Handler wps_route(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const ValidationError& e) {
        wps_exception(res, 400, "InvalidParameterValue", e.what());
      } catch (const NotFound& e) {
        wps_exception(res, 404, "InvalidParameterValue", e.what());
      } catch (const ProtocolError& e) {
        wps_exception(res, 400, "NoApplicableCode", e.what());
      } catch (const std::exception& e) {
        spdlog::error("WPS request failed: {}", e.what());
        wps_exception(res, 500, "NoApplicableCode", e.what());
      }
    };
  }

  // -------------------------------------------------------------------------
  // WPS surface

  std::optional<catalog::ProcessDescriptor> local_process(const std::string& identifier) {
    auto d = env.catalog().find_by_wrapper(identifier);
    if (!d || !d->is_local()) return std::nullopt;
    return d;
  }

  void wps_get(const httplib::Request& req, httplib::Response& res) {
    auto service = kvp(req, "service");
    auto request = kvp(req, "request");
    if (!service) return wps_exception(res, 400, "MissingParameterValue", "service is required", "service");
    if (!iequals(*service, "WPS")) return wps_exception(res, 400, "InvalidParameterValue", "service must be WPS", "service");
    if (!request) return wps_exception(res, 400, "MissingParameterValue", "request is required", "request");
    if (auto version = kvp(req, "version"); version && *version != wps::kVersion && !iequals(*request, "GetCapabilities"))
      return wps_exception(res, 400, "VersionNegotiationFailed", "only version 1.0.0 is supported", "version");

    if (iequals(*request, "GetCapabilities")) {
      wps::CapabilitiesDoc doc;
      doc.service_title = "wpsenv processing service";
      for (const auto& d : env.catalog().all()) {
        if (!d.is_local()) continue;
        wps::ProcessBrief b{d.wrapper_name, d.display_name, std::nullopt};
        if (!d.description.empty()) b.abstract = d.description;
        doc.process_briefs.push_back(std::move(b));
      }
      res.set_content(wps::encode_capabilities(doc, base() + "/wps"), kXml);
      return;
    }
    if (iequals(*request, "DescribeProcess")) {
      auto ids = kvp(req, "identifier");
      if (!ids || ids->empty())
        return wps_exception(res, 400, "MissingParameterValue", "identifier is required", "identifier");
      std::vector<wps::ProcessDescription> out;
      if (iequals(*ids, "ALL")) {
        for (const auto& d : env.catalog().all())
          if (d.is_local()) out.push_back(d.to_process_description());
      } else {
        size_t start = 0;
        for (;;) {
          auto comma = ids->find(',', start);
          std::string id = ids->substr(start, comma == std::string::npos ? std::string::npos : comma - start);
          auto d = local_process(id);
          if (!d) return wps_exception(res, 400, "InvalidParameterValue", "no such process: " + id, "identifier");
          out.push_back(d->to_process_description());
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
      }
      res.set_content(wps::encode_process_descriptions(out), kXml);
      return;
    }
    if (iequals(*request, "Execute"))
      return wps_exception(res, 400, "OperationNotSupported", "Execute is accepted as XML POST only", "request");
    wps_exception(res, 400, "OperationNotSupported", "unknown request " + *request, "request");
  }

  wps::ExecuteResponse response_for(const exec::ExecutionInstance& inst, const catalog::ProcessDescriptor& desc) {
    wps::ExecuteResponse r;
    r.process_id = desc.wrapper_name;
    r.status = inst.status;
    if (inst.mode == exec::Mode::Async) r.status_location = base() + "/wps/status/" + inst.id;
    if (!std::holds_alternative<wps::Succeeded>(inst.status.state)) return r;
    for (const auto& rec : inst.results) {
      if (const auto* lit = std::get_if<exec::LiteralResult>(&rec.value)) {
        r.outputs.emplace_back(rec.param_id, wps::LiteralVal{lit->text});
      } else {
        std::string mime = "application/octet-stream";
        if (const auto* p = desc.find_output(rec.param_id))
          if (const auto* c = std::get_if<wps::ComplexType>(&p->decl.dtype)) mime = c->mime;
        r.outputs.emplace_back(rec.param_id,
                               wps::ComplexRef{base() + "/wps/outputs/" + inst.id + "/" + rec.param_id, mime});
      }
    }
    return r;
  }

  void wps_post(const httplib::Request& req, httplib::Response& res) {
    auto request = wps::decode_execute(req.body);
    auto desc = local_process(request.process_id);
    if (!desc)
      return wps_exception(res, 400, "InvalidParameterValue", "no such process: " + request.process_id, "Identifier");
    exec::ParamValues values;
    for (const auto& [id, v] : request.inputs) {
      const auto* p = desc->find_input(id);
      if (!p) return wps_exception(res, 400, "InvalidParameterValue", "unknown input " + id, id);
      const auto* lit = std::get_if<wps::LiteralVal>(&v);
      try {
        if (lit && std::holds_alternative<wps::LiteralType>(p->decl.dtype))
          values.emplace_back(id, catalog::validate_input(p->widget, lit->text, kWpsUser, env.store()));
        else
          values.emplace_back(id, catalog::Marshaled{v});
      } catch (const ValidationError& e) {
        return wps_exception(res, 400, "InvalidParameterValue", e.what(), id);
      }
    }
    for (const auto& out : request.response_form.requested_outputs)
      if (!desc->find_output(out))
        return wps_exception(res, 400, "InvalidParameterValue", "unknown output " + out, out);
    auto mode = request.response_form.store_results ? exec::Mode::Async : exec::Mode::Sync;
    std::string id;
    try {
      id = env.executor().execute(*desc, values, kWpsUser, mode);
    } catch (const ValidationError& e) {
      return wps_exception(res, 400, "InvalidParameterValue", e.what());
    }
    auto inst = mode == exec::Mode::Sync ? env.executor().wait(id) : *env.executor().get(id);
    res.set_content(wps::encode_execute_response(response_for(inst, *desc)), kXml);
  }

  std::pair<exec::ExecutionInstance, catalog::ProcessDescriptor> wps_instance(const std::string& id) {
    auto inst = env.executor().get(id);
    if (!inst || inst->user != kWpsUser) throw NotFound("no such execution " + id);
    auto desc = env.catalog().get(inst->target);
    if (!desc) throw NotFound("process of execution " + id + " is gone");
    return {*inst, *desc};
  }

  // -------------------------------------------------------------------------
  // REST

  json execution_json(const exec::ExecutionInstance& inst) {
    json j = inst;
    j.erase("log");
    j["service_id"] = inst.target;
    json children = json::array();
    for (const auto& other : env.executor().list(inst.user))
      if (other.parent_id == inst.id) children.push_back(other.id);
    j["children"] = children;
    return j;
  }

  exec::ExecutionInstance own_instance(const std::string& id, const std::string& user) {
    auto inst = env.executor().get(id);
    if (!inst || inst->user != user) throw NotFound("no such execution " + id);
    return *inst;
  }

  Draft& own_draft(const json& body, const std::string& user) {
    auto id = field<std::string>(body, "draft_id");
    auto it = drafts.find(id);
    if (it == drafts.end() || it->second.user != user) throw NotFound("no such registration draft " + id);
    return it->second;
  }

  void register_step(const httplib::Request& req, httplib::Response& res, const std::string& user) {
    json body = parse_body(req);
    auto step = field<std::string>(body, "step");
    if (step == "begin") {
      auto draft = catalog::begin_registration(field<std::string>(body, "display_name"),
                                               body.value("description", std::string()),
                                               field<std::string>(body, "endpoint"));
      std::string id = random_id("d");
      std::lock_guard lock(drafts_mutex);
      drafts[id] = Draft{user, std::move(draft)};
      return send_json(res, 201, json{{"draft_id", id}, {"step", "begin"}});
    }
    // steps 2 and 3 do network I/O; work on a copy outside the lock
    catalog::RegistrationDraft draft;
    std::string id = field<std::string>(body, "draft_id");
    {
      std::lock_guard lock(drafts_mutex);
      draft = own_draft(body, user).draft;
    }
    json out{{"draft_id", id}, {"step", step}};
    if (step == "list") {
      auto briefs = catalog::list_remote_processes(draft);
      auto& list = out["processes"] = json::array();
      for (const auto& b : briefs) {
        json e{{"identifier", b.identifier}, {"title", b.title}};
        if (b.abstract) e["abstract"] = *b.abstract;
        list.push_back(std::move(e));
      }
    } else if (step == "select") {
      catalog::select_remote_process(draft, field<std::string>(body, "identifier"));
      const auto& pd = *draft.selected;
      json d{{"identifier", pd.identifier}, {"title", pd.title}, {"store_supported", pd.store_supported},
             {"status_supported", pd.status_supported}};
      if (pd.abstract) d["abstract"] = *pd.abstract;
      for (const auto& p : pd.inputs) d["inputs"].push_back(param_decl_json(p, false));
      for (const auto& p : pd.outputs) d["outputs"].push_back(param_decl_json(p, true));
      out["description"] = d;
      out["suggested_wrapper_name"] = env.catalog().default_wrapper_name(pd.identifier);
    } else if (step == "finalize") {
      std::vector<catalog::WidgetBinding> bindings;
      json bindings_json = body.value("bindings", json::array());
      for (const auto& b : bindings_json) {
        catalog::WidgetBinding wb;
        if (b.contains("param_id"))
          wb.param_id = field<std::string>(b, "param_id");
        else
          wb.param_id = field<std::string>(field<json>(b, "decl"), "identifier");
        wb.widget = field<catalog::WidgetDescriptor>(b, "widget");
        wb.human_name = b.value("human_name", std::string());
        wb.human_description = b.value("human_description", std::string());
        bindings.push_back(std::move(wb));
      }
      auto desc = env.catalog().finalize_registration(draft, bindings, body.value("wrapper_name", std::string()));
      std::lock_guard lock(drafts_mutex);
      drafts.erase(id);
      return send_json(res, 201, json(desc));
    } else {
      throw ValidationError("step must be begin, list, select or finalize");
    }
    std::lock_guard lock(drafts_mutex);
    if (auto it = drafts.find(id); it != drafts.end()) it->second.draft = std::move(draft);
    send_json(res, 200, out);
  }

  void create_execution(const httplib::Request& req, httplib::Response& res, const std::string& user) {
    json body = parse_body(req);
    auto service = field<std::string>(body, "service_id");
    auto desc = env.catalog().resolve(service);
    if (!desc) throw NotFound("no such service " + service);
    auto mode_name = body.value("mode", std::string("async"));
    if (mode_name != "sync" && mode_name != "async") throw ValidationError("mode must be sync or async");
    exec::ParamValues values;
    json supplied = body.value("values", json::object());
    if (!supplied.is_object()) throw ValidationError("values must be an object");
    for (const auto& [key, raw] : supplied.items()) {
      const catalog::BoundParam* p = desc->find_input(key);
      if (!p) p = desc->find_output(key);
      if (!p) throw ValidationError("service " + desc->wrapper_name + " has no parameter " + key);
      std::string text = raw.is_string() ? raw.get<std::string>() : raw.dump();
      values.emplace_back(key, catalog::validate_input(p->widget, text, user, env.store()));
    }
    auto mode = mode_name == "sync" ? exec::Mode::Sync : exec::Mode::Async;
    auto id = env.executor().execute(*desc, values, user, mode);
    auto inst = mode == exec::Mode::Sync ? env.executor().wait(id) : *env.executor().get(id);
    send_json(res, mode == exec::Mode::Sync ? 200 : 202, execution_json(inst));
  }

  void routes() {
    // WPS protocol (unauthenticated)
    server.Get("/wps", wps_route([this](const auto& req, auto& res) { wps_get(req, res); }));
    server.Post("/wps", wps_route([this](const auto& req, auto& res) { wps_post(req, res); }));
    server.Get(R"(/wps/status/([A-Za-z0-9]+))", wps_route([this](const auto& req, auto& res) {
                 auto [inst, desc] = wps_instance(req.matches[1]);
                 res.set_content(wps::encode_execute_response(response_for(inst, desc)), kXml);
               }));
    server.Get(R"(/wps/outputs/([A-Za-z0-9]+)/([A-Za-z0-9_]+))", wps_route([this](const auto& req, auto& res) {
                 auto [inst, desc] = wps_instance(req.matches[1]);
                 std::string param = req.matches[2];
                 for (const auto& r : inst.results)
                   if (const auto* f = std::get_if<exec::StoredFile>(&r.value); f && r.param_id == param) {
                     std::string mime = "application/octet-stream";
                     if (const auto* p = desc.find_output(param))
                       if (const auto* c = std::get_if<wps::ComplexType>(&p->decl.dtype)) mime = c->mime;
                     res.set_content(env.store().read_file(kWpsUser, f->path), mime);
                     return;
                   }
                 throw NotFound("no stored output " + param + " for " + inst.id);
               }));

    // one-time links
    server.Get(R"(/files/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto r = env.links().serve(req.matches[1]);
      switch (r.outcome) {
        case store::ServeOutcome::Ok: res.set_content(std::move(r.bytes), "application/octet-stream"); return;
        case store::ServeOutcome::Gone: send_error(res, 410, "gone", "link is exhausted or terminated"); return;
        case store::ServeOutcome::NotFound: send_error(res, 404, "not_found", "unknown link"); return;
      }
    });

    // REST
    server.Get("/api/services", rest([this](const auto& req, auto& res, const std::string&) {
                 send_json(res, 200, json(env.catalog().search(req.get_param_value("q"))));
               }));
    server.Post("/api/services",
                rest([this](const auto& req, auto& res, const std::string& user) { register_step(req, res, user); }));
    server.Get(R"(/api/services/([^/]+))", rest([this](const auto& req, auto& res, const std::string&) {
                 auto d = env.catalog().resolve(req.matches[1]);
                 if (!d) throw NotFound("no such service " + std::string(req.matches[1]));
                 send_json(res, 200, json(*d));
               }));
    server.Post("/api/executions", rest([this](const auto& req, auto& res, const std::string& user) {
                  create_execution(req, res, user);
                }));
    server.Get("/api/executions", rest([this](const auto& req, auto& res, const std::string& user) {
                 json out = json::array();
                 auto parent = req.get_param_value("parent");
                 for (const auto& inst : env.executor().list(user))
                   if (parent.empty() || (inst.parent_id && *inst.parent_id == parent)) {
                     json j = inst;
                     j.erase("log");
                     out.push_back(std::move(j));
                   }
                 send_json(res, 200, out);
               }));
    server.Get(R"(/api/executions/([A-Za-z0-9]+))", rest([this](const auto& req, auto& res, const std::string& user) {
                 send_json(res, 200, execution_json(own_instance(req.matches[1], user)));
               }));
    server.Get(R"(/api/executions/([A-Za-z0-9]+)/log)",
               rest([this](const auto& req, auto& res, const std::string& user) {
                 auto inst = own_instance(req.matches[1], user);
                 std::size_t since = 0;
                 if (req.has_param("since")) {
                   try {
                     since = std::stoul(req.get_param_value("since"));
                   } catch (const std::exception&) {
                     throw ValidationError("since must be a non-negative integer");
                   }
                 }
                 json entries = json::array();
                 for (std::size_t i = since; i < inst.log.size(); ++i)
                   entries.push_back({{"at", format_instant(inst.log[i].at)},
                                      {"level", inst.log[i].level},
                                      {"text", inst.log[i].text}});
                 send_json(res, 200,
                           json{{"entries", entries},
                                {"next", std::max(since, inst.log.size())},
                                {"terminal", inst.terminal()},
                                {"status", wps::state_name(inst.status.state)}});
               }));
    server.Post(R"(/api/executions/([A-Za-z0-9]+)/cancel)",
                rest([this](const auto& req, auto& res, const std::string& user) {
                  auto inst = own_instance(req.matches[1], user);
                  bool cancelled = env.executor().cancel(inst.id);
                  send_json(res, 200, json{{"cancelled", cancelled}, {"execution", execution_json(*env.executor().get(inst.id))}});
                }));
    server.Get("/api/files", rest([this](const auto& req, auto& res, const std::string& user) {
                 auto dir = req.get_param_value("dir");
                 json entries = json::array();
                 for (const auto& e : env.store().list(user, dir))
                   entries.push_back({{"name", e.name}, {"is_dir", e.is_dir}, {"size", e.size}});
                 send_json(res, 200,
                           json{{"dir", dir},
                                {"entries", entries},
                                {"used_bytes", env.store().used_bytes(user)},
                                {"quota", env.store().quota(user)}});
               }));
    server.Get(R"(/api/files/(.+))", rest([this](const auto& req, auto& res, const std::string& user) {
                 res.set_content(env.store().read_file(user, std::string(req.matches[1])), "application/octet-stream");
               }));
    server.Put(R"(/api/files/(.+))", rest([this](const auto& req, auto& res, const std::string& user) {
                 auto st = env.store().put_file(user, std::string(req.matches[1]), req.body);
                 send_json(res, 200, json{{"path", st.path}, {"size", st.size}});
               }));
    server.Delete(R"(/api/files/(.+))", rest([this](const auto& req, auto& res, const std::string& user) {
                    if (!env.store().remove_file(user, std::string(req.matches[1])))
                      throw NotFound("no such file " + std::string(req.matches[1]));
                    res.status = 204;
                  }));
    server.Post("/api/scenarios", rest([this](const auto& req, auto& res, const std::string& user) {
                  json body = parse_body(req);
                  auto pkg = body.get<script::ScenarioPackage>();
                  send_json(res, 201, json(script::publish_scenario(env.catalog(), pkg, user)));
                }));
    server.Get("/api/chains", rest([this](const auto&, auto& res, const std::string&) {
                 json out = json::array();
                 for (const auto& p : chaining::chainable_pairs(env.catalog().all()))
                   out.push_back({{"producer", slot_json(p.producer)}, {"consumer", slot_json(p.consumer)}});
                 send_json(res, 200, out);
               }));
  }
};

Gateway::Gateway(Environment& env, TokenTable tokens, std::size_t threads)
    : impl_(std::make_unique<Impl>(env, std::move(tokens), threads)) {}

Gateway::~Gateway() { stop(); }

void Gateway::start(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port))
    throw NetworkError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Gateway::listen(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port))
    throw NetworkError("cannot bind " + host + ":" + std::to_string(port));
  impl_->server.listen_after_bind();
}

void Gateway::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace wpsenv::gateway
