#include "cli.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "rest_client.hpp"
#include "wpsenv/error.hpp"
#include "wpsenv/gateway/environment.hpp"
#include "wpsenv/gateway/server.hpp"

namespace wpsenv::cli {

using nlohmann::json;

namespace {

std::string read_local(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError(kValidation, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_local(path));
  } catch (const json::exception& e) {
    throw CommandError(kValidation, path + " is not valid JSON: " + e.what());
  }
}

json parse_values(const std::vector<std::string>& pairs) {
  json values = json::object();
  for (const auto& kv : pairs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CommandError(kValidation, "--in expects key=value, got '" + kv + "'");
    values[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return values;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (widths.size() <= i) widths.push_back(0);
      widths[i] = std::max(widths[i], r[i].size());
    }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) line += (i + 1 < r.size() ? pad(r[i], widths[i] + 2) : r[i]);
    out << line << '\n';
  }
}

std::string signature(const json& svc) {
  std::string s = svc.value("wrapper_name", "") + "(";
  bool first = true;
  for (const char* side : {"inputs", "outputs"})
    for (const auto& p : svc.value(side, json::array())) {
      if (!first) s += ", ";
      first = false;
      s += p["decl"]["identifier"].get<std::string>();
    }
  return s + ")";
}

void print_results(std::ostream& out, const json& inst) {
  for (const auto& r : inst.value("results", json::array())) {
    out << r["param_id"].get<std::string>() << " = ";
    if (r.value("kind", "") == "stored_file")
      out << r["path"].get<std::string>() << '\n';
    else
      out << r.value("text", "") << '\n';
  }
}

class Commands {
 public:
  Commands(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  std::string server;
  std::string token;
  bool as_json = false;

  RestClient client() const {
    if (token.empty()) throw CommandError(kValidation, "no token: pass --token or set WPSENV_TOKEN");
    return RestClient(server, token);
  }

  int svc_register(const std::string& endpoint, const std::string& identifier, const std::string& name,
                   const std::string& description, const std::string& widgets_file, const std::string& wrapper) {
    auto api = client();
    json bindings = json::array();
    if (!widgets_file.empty()) {
      bindings = read_json_file(widgets_file);
      if (!bindings.is_array()) throw CommandError(kValidation, widgets_file + " must hold an array of bound parameters");
    }
    auto begin = api.post("/api/services",
                          {{"step", "begin"}, {"display_name", name}, {"description", description}, {"endpoint", endpoint}});
    std::string draft = begin["draft_id"];
    api.post("/api/services", {{"step", "list"}, {"draft_id", draft}});
    auto sel = api.post("/api/services", {{"step", "select"}, {"draft_id", draft}, {"identifier", identifier}});
    // parameters the widgets file leaves out get the suggested widget
    for (const char* side : {"inputs", "outputs"})
      for (const auto& p : sel["description"].value(side, json::array())) {
        std::string id = p["identifier"];
        bool bound = std::any_of(bindings.begin(), bindings.end(), [&](const json& b) {
          return b.value("param_id", b.contains("decl") ? b["decl"].value("identifier", "") : "") == id;
        });
        if (!bound) bindings.push_back({{"param_id", id}, {"widget", {{"kind", p["suggested_widget"]}}}});
      }
    json fin{{"step", "finalize"}, {"draft_id", draft}, {"bindings", bindings}};
    if (!wrapper.empty()) fin["wrapper_name"] = wrapper;
    auto desc = api.post("/api/services", fin);
    if (as_json)
      out_ << desc.dump(2) << '\n';
    else
      out_ << "registered " << desc["local_id"].get<std::string>() << " as " << signature(desc) << '\n';
    return kOk;
  }

  int svc_list(const std::string& query) {
    auto list = client().get("/api/services?q=" + encode_path(query));
    if (as_json) {
      out_ << list.dump(2) << '\n';
      return kOk;
    }
    std::vector<std::vector<std::string>> rows{{"ID", "KIND", "NAME", "WRAPPER"}};
    for (const auto& s : list)
      rows.push_back({s["local_id"], s["kind"], s["display_name"], signature(s)});
    print_table(out_, rows);
    return kOk;
  }

  int svc_show(const std::string& id) {
    out_ << client().get("/api/services/" + encode_path(id)).dump(2) << '\n';
    return kOk;
  }

  int run(const std::string& service, const std::vector<std::string>& ins, bool async) {
    auto api = client();
    auto inst = api.post("/api/executions", {{"service_id", service}, {"values", parse_values(ins)}, {"mode", "async"}});
    std::string id = inst["id"];
    if (async) {
      if (as_json)
        out_ << inst.dump(2) << '\n';
      else
        out_ << id << '\n';
      return kOk;
    }
    if (!as_json) out_ << id << '\n';
    follow_log(api, id, !as_json);
    inst = api.get("/api/executions/" + id);
    if (as_json) out_ << inst.dump(2) << '\n';
    if (inst["status"].value("state", "") == "failed") {
      err_ << "execution " << id << " failed: " << inst["status"].value("message", "") << '\n';
      return kRemoteFault;
    }
    if (!as_json) print_results(out_, inst);
    return kOk;
  }

  int logs(const std::string& id, bool follow) {
    auto api = client();
    if (follow) {
      follow_log(api, id, true);
      return kOk;
    }
    auto page = api.get("/api/executions/" + encode_path(id) + "/log");
    print_entries(page["entries"]);
    return kOk;
  }

  int scenario_publish(const std::string& file) {
    auto desc = client().post("/api/scenarios", read_json_file(file));
    if (as_json)
      out_ << desc.dump(2) << '\n';
    else
      out_ << "published " << desc["local_id"].get<std::string>() << " as " << signature(desc) << '\n';
    return kOk;
  }

  int scenario_export(const std::string& id, const std::string& file) {
    auto d = client().get("/api/services/" + encode_path(id));
    if (d.value("kind", "") != "scenario") throw CommandError(kValidation, id + " is not a scenario");
    json pkg{{"name", d["display_name"]},
             {"description", d["description"]},
             {"wrapper_name", d["wrapper_name"]},
             {"entry_function", d["scenario"]["entry_function"]},
             {"inputs", d["inputs"]},
             {"outputs", d["outputs"]},
             {"source", d["scenario"]["source"]}};
    if (file.empty() || file == "-") {
      out_ << pkg.dump(2) << '\n';
    } else {
      std::ofstream f(file);
      f << pkg.dump(2) << '\n';
      if (!f) throw CommandError(kValidation, "cannot write " + file);
    }
    return kOk;
  }

  int cancel(const std::string& id) {
    auto r = client().post("/api/executions/" + encode_path(id) + "/cancel", json::object());
    out_ << (r.value("cancelled", false) ? "cancelled " : "already finished ") << id << '\n';
    return kOk;
  }

  int files_put(const std::string& local, const std::string& remote) {
    auto r = client().put_bytes("/api/files/" + encode_path(remote), read_local(local));
    out_ << r["path"].get<std::string>() << " (" << r["size"].dump() << " bytes)\n";
    return kOk;
  }

  int files_get(const std::string& remote, const std::string& local) {
    auto bytes = client().get_bytes("/api/files/" + encode_path(remote));
    if (local.empty() || local == "-") {
      out_ << bytes;
    } else {
      std::ofstream f(local, std::ios::binary);
      f << bytes;
      if (!f) throw CommandError(kValidation, "cannot write " + local);
    }
    return kOk;
  }

  int files_ls(const std::string& dir) {
    auto r = client().get("/api/files?dir=" + encode_path(dir));
    if (as_json) {
      out_ << r.dump(2) << '\n';
      return kOk;
    }
    for (const auto& e : r["entries"])
      out_ << (e.value("is_dir", false) ? "d " : "- ") << std::setw(10) << e["size"].dump() << ' '
           << e["name"].get<std::string>() << '\n';
    return kOk;
  }

  int files_rm(const std::string& remote) {
    client().del("/api/files/" + encode_path(remote));
    return kOk;
  }

 private:
  void print_entries(const json& entries) {
    for (const auto& e : entries)
      out_ << e["at"].get<std::string>() << ' ' << e["level"].get<std::string>() << ' ' << e["text"].get<std::string>()
           << '\n';
    out_.flush();
  }

  void follow_log(const RestClient& api, const std::string& id, bool print) {
    std::size_t since = 0;
    auto delay = std::chrono::milliseconds(100);
    for (;;) {
      auto page = api.get("/api/executions/" + encode_path(id) + "/log?since=" + std::to_string(since));
      if (print) print_entries(page["entries"]);
      since = page["next"].get<std::size_t>();
      if (page["terminal"].get<bool>()) return;
      std::this_thread::sleep_for(delay);
      delay = std::min(delay * 2, std::chrono::milliseconds(1000));
    }
  }

  std::ostream& out_;
  std::ostream& err_;
};

int serve() {
  auto config = gateway::ApiConfig::from_env();
  config.validate();
  // signals are collected by sigwait below, so block them before any thread starts
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  gateway::Environment env(config);
  auto tokens = gateway::load_tokens(config.data_dir / "users.json");
  if (tokens.empty()) spdlog::warn("no tokens in {}; the REST API will reject every request", (config.data_dir / "users.json").string());
  gateway::Gateway gw(env, std::move(tokens));
  gw.start(config.host(), config.port());
  spdlog::info("serving on {} (public {}), data in {}", config.bind_addr, config.base_url(), config.data_dir.string());
  int sig = 0;
  sigwait(&set, &sig);
  spdlog::info("signal {}; shutting down", sig);
  gw.stop();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const char* (*env)(const char*)) {
  if (!env) env = [](const char* name) -> const char* { return std::getenv(name); };
  Commands cmd(out, err);
  const char* srv = env("WPSENV_SERVER");
  const char* tok = env("WPSENV_TOKEN");
  cmd.server = srv && *srv ? srv : "http://127.0.0.1:8080";
  cmd.token = tok ? tok : "";

  CLI::App app{"wpsenv: run the WPS environment server and drive it over REST", "wpsenv"};
  app.require_subcommand(1);
  app.add_option("--server", cmd.server, "server base URL (env WPSENV_SERVER)");
  app.add_option("--token", cmd.token, "bearer token (env WPSENV_TOKEN)");
  app.add_flag("--json", cmd.as_json, "machine-readable output");

  std::function<int()> action;

  app.add_subcommand("serve", "run the gateway with configuration from WPSENV_* variables")->callback([&] {
    action = serve;
  });

  auto* svc = app.add_subcommand("svc", "service catalog")->require_subcommand(1);
  struct {
    std::string endpoint, identifier, name, description, widgets, wrapper, query, id;
  } s;
  auto* reg = svc->add_subcommand("register", "register a process from a remote WPS server");
  reg->add_option("--endpoint", s.endpoint, "WPS endpoint URL")->required();
  reg->add_option("--identifier", s.identifier, "remote process identifier")->required();
  reg->add_option("--name", s.name, "display name")->required();
  reg->add_option("--description", s.description, "description");
  reg->add_option("--widgets", s.widgets, "JSON array of bound parameters")->check(CLI::ExistingFile);
  reg->add_option("--wrapper", s.wrapper, "wrapper function name");
  reg->callback([&] {
    action = [&] { return cmd.svc_register(s.endpoint, s.identifier, s.name, s.description, s.widgets, s.wrapper); };
  });
  auto* list = svc->add_subcommand("list", "search the catalog");
  list->add_option("--query,-q", s.query, "substring of name or description");
  list->callback([&] { action = [&] { return cmd.svc_list(s.query); }; });
  auto* show = svc->add_subcommand("show", "print one descriptor");
  show->add_option("id", s.id, "local id or wrapper name")->required();
  show->callback([&] { action = [&] { return cmd.svc_show(s.id); }; });

  struct {
    std::string service;
    std::vector<std::string> ins;
    bool async = false;
  } r;
  auto* run = app.add_subcommand("run", "execute a service");
  run->add_option("--service", r.service, "local id or wrapper name")->required();
  run->add_option("--in", r.ins, "parameter value, key=value (repeatable)");
  run->add_flag("--async", r.async, "print the instance id and return");
  run->callback([&] { action = [&] { return cmd.run(r.service, r.ins, r.async); }; });

  auto* scen = app.add_subcommand("scenario", "scenario packages")->require_subcommand(1);
  std::string pkg_file, scen_id, out_file;
  auto* pub = scen->add_subcommand("publish", "publish a scenario package");
  pub->add_option("package", pkg_file, "package JSON file")->required()->check(CLI::ExistingFile);
  pub->callback([&] { action = [&] { return cmd.scenario_publish(pkg_file); }; });
  auto* srun = scen->add_subcommand("run", "execute a published scenario");
  srun->add_option("id", r.service, "local id or wrapper name")->required();
  srun->add_option("--in", r.ins, "parameter value, key=value (repeatable)");
  srun->add_flag("--async", r.async, "print the instance id and return");
  srun->callback([&] { action = [&] { return cmd.run(r.service, r.ins, r.async); }; });
  auto* exp = scen->add_subcommand("export", "write a published scenario as a package");
  exp->add_option("id", scen_id, "local id or wrapper name")->required();
  exp->add_option("-o,--output", out_file, "output file (default stdout)");
  exp->callback([&] { action = [&] { return cmd.scenario_export(scen_id, out_file); }; });

  std::string inst_id;
  bool follow = false;
  auto* logs = app.add_subcommand("logs", "print an execution log");
  logs->add_option("instance", inst_id, "instance id")->required();
  logs->add_flag("--follow,-f", follow, "poll until the instance finishes");
  logs->callback([&] { action = [&] { return cmd.logs(inst_id, follow); }; });
  auto* cancel = app.add_subcommand("cancel", "cancel a running execution");
  cancel->add_option("instance", inst_id, "instance id")->required();
  cancel->callback([&] { action = [&] { return cmd.cancel(inst_id); }; });

  auto* files = app.add_subcommand("files", "personal data store")->require_subcommand(1);
  std::string local, remote, dir;
  auto* put = files->add_subcommand("put", "upload a file");
  put->add_option("local", local)->required()->check(CLI::ExistingFile);
  put->add_option("remote", remote)->required();
  put->callback([&] { action = [&] { return cmd.files_put(local, remote); }; });
  auto* get = files->add_subcommand("get", "download a file");
  get->add_option("remote", remote)->required();
  get->add_option("local", local, "destination (default stdout)");
  get->callback([&] { action = [&] { return cmd.files_get(remote, local); }; });
  auto* ls = files->add_subcommand("ls", "list a directory");
  ls->add_option("dir", dir);
  ls->callback([&] { action = [&] { return cmd.files_ls(dir); }; });
  auto* rm = files->add_subcommand("rm", "delete a file");
  rm->add_option("remote", remote)->required();
  rm->callback([&] { action = [&] { return cmd.files_rm(remote); }; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }
  try {
    return action();
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::Network:
      case ErrorCode::Protocol:
      case ErrorCode::Timeout: return kNetwork;
      case ErrorCode::RemoteFault: return kRemoteFault;
      default: return kValidation;
    }
  } catch (const json::exception& e) {
    err << "error: unexpected response shape: " << e.what() << '\n';
    return kNetwork;
  }
}

}  // namespace wpsenv::cli
