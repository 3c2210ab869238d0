#include "wpsenv/script/scenario.hpp"

#include <set>

#include "wpsenv/error.hpp"
#include "wpsenv/numfmt.hpp"
#include "wpsenv/store/datastore.hpp"
#include "wpsenv/wps/client.hpp"

namespace wpsenv::script {

using catalog::BoundParam;
using catalog::ProcessDescriptor;
using catalog::ProcessKind;

void to_json(nlohmann::json& j, const ScenarioPackage& p) {
  j = nlohmann::json{{"name", p.name},     {"description", p.description}, {"wrapper_name", p.wrapper_name},
                     {"entry_function", p.entry_function}, {"inputs", p.inputs}, {"outputs", p.outputs},
                     {"source", p.source}};
}

void from_json(const nlohmann::json& j, ScenarioPackage& p) {
  try {
    p.name = j.at("name").get<std::string>();
    p.description = j.value("description", std::string());
    p.wrapper_name = j.at("wrapper_name").get<std::string>();
    p.entry_function = j.value("entry_function", p.wrapper_name);
    p.inputs = j.value("inputs", std::vector<BoundParam>{});
    p.outputs = j.value("outputs", std::vector<BoundParam>{});
    p.source = j.at("source").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scenario package: ") + e.what());
  }
}

ScenarioProgram compile_scenario(const ScenarioPackage& pkg, ScenarioHost* host) {
  ScenarioProgram prog;
  prog.source = pkg.source;
  prog.ast = std::make_shared<const Program>(parse_source(pkg.source));
  prog.declared_inputs = pkg.inputs;
  prog.declared_outputs = pkg.outputs;
  prog.entry_function = pkg.entry_function;
  prog.wrapper_name = pkg.wrapper_name;

  const FunctionDecl* entry = prog.ast->find(pkg.entry_function);
  if (!entry) throw ScriptError({0, 0}, "entry function '" + pkg.entry_function + "' is not defined");
  std::size_t declared = pkg.inputs.size() + pkg.outputs.size();
  if (entry->params.size() != declared)
    throw ScriptError(entry->pos, "entry function '" + pkg.entry_function + "' takes " +
                                      std::to_string(entry->params.size()) + " parameters but " +
                                      std::to_string(declared) + " are declared");
  std::set<std::string> ids;
  for (const auto* list : {&pkg.inputs, &pkg.outputs})
    for (const auto& p : *list) {
      if (!catalog::is_identifier(p.decl.identifier))
        throw ValidationError("parameter identifier must be an identifier: '" + p.decl.identifier + "'");
      if (!ids.insert(p.decl.identifier).second) throw ValidationError("duplicate parameter " + p.decl.identifier);
      wps::check(p.decl.dtype);
      catalog::check(p.widget);
      if (!catalog::widget_compatible(p.widget.kind, p.decl.dtype))
        throw ValidationError(std::string(catalog::to_string(p.widget.kind)) + " widget cannot bind " +
                                  wps::describe(p.decl.dtype) + " parameter " + p.decl.identifier,
                              std::string(catalog::to_string(p.widget.kind)));
    }
  check_calls(*prog.ast, host);
  return prog;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> CatalogResolver::wrapper_arity(const std::string& name) {
  auto d = catalog_.find_by_wrapper(name);
  if (!d) return std::nullopt;
  return d->inputs.size() + d->outputs.size();
}

Value CatalogResolver::call_wrapper(const std::string& name, const std::vector<Value>&) {
  throw IllegalState("wrapper '" + name + "' cannot run here");
}

Value CatalogResolver::call_wps(const std::string&, const std::string& process_id, const Object&) {
  throw IllegalState("CallWPS(" + process_id + ") cannot run here");
}

ProcessDescriptor publish_scenario(catalog::Catalog& catalog, const ScenarioPackage& pkg, const std::string& owner) {
  if (!catalog::valid_wrapper_name(pkg.wrapper_name))
    throw ValidationError("wrapper_name must match [A-Za-z_][A-Za-z0-9_]*: '" + pkg.wrapper_name + "'");
  if (builtin_arities().count(pkg.wrapper_name))
    throw ValidationError("wrapper_name '" + pkg.wrapper_name + "' is a builtin");
  if (catalog.find_by_wrapper(pkg.wrapper_name)) throw catalog::DuplicateWrapper(pkg.wrapper_name);
  CatalogResolver resolver(catalog);
  auto prog = compile_scenario(pkg, &resolver);

  ProcessDescriptor d;
  d.display_name = pkg.name.empty() ? pkg.wrapper_name : pkg.name;
  d.description = pkg.description;
  d.endpoint = std::string(catalog::kLocalEndpoint);
  d.remote_identifier = pkg.wrapper_name;
  d.inputs = pkg.inputs;
  d.outputs = pkg.outputs;
  d.wrapper_name = pkg.wrapper_name;
  d.kind = ProcessKind::Scenario;
  d.store_supported = true;
  d.status_supported = true;
  d.scenario = catalog::ScenarioSource{pkg.source, pkg.entry_function, owner};
  return catalog.add(std::move(d));
}

// ---------------------------------------------------------------------------

ExecutorScenarioHost::ExecutorScenarioHost(exec::Executor& executor, const catalog::Catalog& catalog,
                                           const store::Datastore& store, std::string user,
                                           std::optional<std::string> parent_id)
    : CatalogResolver(catalog),
      executor_(executor),
      catalog_(catalog),
      store_(store),
      user_(std::move(user)),
      parent_id_(std::move(parent_id)) {}

namespace {

std::string literal_of(const Value& v) {
  if (auto t = v.text()) return *t;
  if (auto n = v.number()) return format_number(*n);
  if (auto b = v.boolean()) return *b ? "true" : "false";
  throw ValidationError(std::string("cannot pass ") + kind_name(v) + " to a service");
}

std::string complex_mime(const BoundParam& p) {
  if (const auto* c = std::get_if<wps::ComplexType>(&p.decl.dtype)) return c->mime;
  throw ValidationError("parameter " + p.decl.identifier + " does not take complex data");
}

}  // namespace

catalog::ValidatedValue ExecutorScenarioHost::input_value(const BoundParam& param, const Value& v) const {
  if (const Object* o = v.object()) {
    if (const Value* href = o->find("href"); href && href->text())
      return catalog::Marshaled{wps::ComplexRef{*href->text(), complex_mime(param)}};
    if (const Value* body = o->find("body"); body && body->text())
      return catalog::Marshaled{wps::ComplexInline{*body->text(), complex_mime(param)}};
    if (const Value* path = o->find("path"); path && path->text())
      return catalog::validate_input(param.widget, *path->text(), user_, store_);
    throw ValidationError("object argument for " + param.decl.identifier + " needs href, body or path");
  }
  if (v.array() || v.matrix() || v.handle())
    throw ValidationError(std::string("cannot pass ") + kind_name(v) + " to parameter " + param.decl.identifier);
  return catalog::validate_input(param.widget, literal_of(v), user_, store_);
}

std::optional<catalog::ValidatedValue> ExecutorScenarioHost::output_value(const BoundParam& param,
                                                                         const Value& v) const {
  if (!std::holds_alternative<wps::ComplexType>(param.decl.dtype)) return std::nullopt;  // literal: arg unused
  if (v.is_null()) return std::nullopt;
  const std::string* dest = v.text();
  if (const Object* o = v.object()) {
    const Value* path = o->find("path");
    dest = path ? path->text() : nullptr;
  }
  if (!dest) throw ValidationError("destination for output " + param.decl.identifier + " must be a path");
  return catalog::SavePath{store::Datastore::normalize(*dest)};
}

Value ExecutorScenarioHost::run_child(const ProcessDescriptor& desc, const exec::ParamValues& values) {
  auto id = executor_.execute(desc, values, user_, exec::Mode::Sync, parent_id_);
  auto inst = executor_.wait(id);
  if (const auto* f = std::get_if<wps::Failed>(&inst.status.state))
    throw RemoteFault(desc.wrapper_name + " failed: " + f->message);
  Object out;
  for (const auto& r : inst.results) {
    if (const auto* lit = std::get_if<exec::LiteralResult>(&r.value)) {
      out.set(r.param_id, Value(lit->text));
    } else {
      Object file;
      file.set("path", Value(std::get<exec::StoredFile>(r.value).path));
      out.set(r.param_id, make_object(std::move(file)));
    }
  }
  return make_object(std::move(out));
}

Value ExecutorScenarioHost::call_wrapper(const std::string& name, const std::vector<Value>& args) {
  auto desc = catalog_.find_by_wrapper(name);
  if (!desc) throw ScriptError({0, 0}, "no wrapper named '" + name + "'");
  std::size_t arity = desc->inputs.size() + desc->outputs.size();
  if (args.size() != arity)
    throw ScriptError({0, 0}, "wrapper '" + name + "' expects " + std::to_string(arity) + " arguments, got " +
                                  std::to_string(args.size()));
  exec::ParamValues values;
  std::size_t i = 0;
  for (const auto& p : desc->inputs) {
    const Value& v = args[i++];
    if (v.is_null() && p.decl.min_occurs == 0) continue;
    if (v.is_null()) throw ValidationError("missing required input " + p.decl.identifier + " for " + name);
    values.emplace_back(p.decl.identifier, input_value(p, v));
  }
  for (const auto& p : desc->outputs)
    if (auto dest = output_value(p, args[i++])) values.emplace_back(p.decl.identifier, *dest);
  return run_child(*desc, values);
}

Value ExecutorScenarioHost::call_wps(const std::string& endpoint, const std::string& process_id,
                                     const Object& inputs) {
  auto desc = catalog_.find_by_remote(endpoint, process_id);
  if (!desc) {
    if (endpoint == catalog::kLocalEndpoint) throw RemoteFault("unknown process '" + process_id + "'");
    try {
      // not registered: describe it on the fly and bind default widgets
      auto pd = wps::Client(endpoint).describe_process(process_id);
      ProcessDescriptor d;
      d.display_name = pd.title.empty() ? pd.identifier : pd.title;
      d.endpoint = endpoint;
      d.remote_identifier = pd.identifier;
      d.wrapper_name = "_adhoc";
      d.kind = ProcessKind::Remote;
      d.store_supported = pd.store_supported;
      d.status_supported = pd.status_supported;
      auto bind = [](const wps::ParamDecl& decl, bool output) {
        BoundParam p;
        p.decl = decl;
        p.widget.kind = catalog::default_widget(decl.dtype, output);
        p.human_name = decl.title;
        return p;
      };
      for (const auto& in : pd.inputs) d.inputs.push_back(bind(in, false));
      for (const auto& out : pd.outputs) d.outputs.push_back(bind(out, true));
      desc = std::move(d);
    } catch (const Error& e) {
      throw RemoteFault("cannot describe " + process_id + " at " + endpoint + ": " + e.what());
    }
  }
  exec::ParamValues values;
  for (const auto& [key, v] : inputs.entries) {
    if (const BoundParam* p = desc->find_input(key)) {
      if (!v.is_null()) values.emplace_back(key, input_value(*p, v));
    } else if (const BoundParam* p = desc->find_output(key)) {
      if (auto dest = output_value(*p, v)) values.emplace_back(key, *dest);
    } else {
      throw ValidationError("process " + process_id + " has no parameter " + key);
    }
  }
  return run_child(*desc, values);
}

// ---------------------------------------------------------------------------

ScenarioBackend::ScenarioBackend(exec::Executor& executor, const catalog::Catalog& catalog, store::Datastore& store,
                                 store::LinkRegistry& links, RunBudget budget)
    : executor_(executor), catalog_(catalog), store_(store), links_(links), budget_(budget) {}

std::shared_ptr<const ScenarioProgram> ScenarioBackend::program_for(const ProcessDescriptor& desc) {
  if (!desc.scenario) throw IllegalState(desc.wrapper_name + " has no scenario source");
  std::string key = desc.local_id + '\n' + desc.scenario->entry_function + '\n' + desc.scenario->source;
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  ScenarioPackage pkg{desc.display_name, desc.description, desc.wrapper_name, desc.scenario->entry_function,
                      desc.inputs, desc.outputs, desc.scenario->source};
  CatalogResolver resolver(catalog_);
  auto prog = std::make_shared<const ScenarioProgram>(compile_scenario(pkg, &resolver));
  std::lock_guard lock(cache_mutex_);
  cache_[key] = prog;
  return prog;
}

Value ScenarioBackend::input_arg(const BoundParam& param, const wps::InputValue& v, exec::RunContext& ctx) {
  if (const auto* lit = std::get_if<wps::LiteralVal>(&v)) {
    if (const auto* lt = std::get_if<wps::LiteralType>(&param.decl.dtype)) {
      if (lt->base == "double" || lt->base == "integer" || lt->base == "float" || lt->base == "int") {
        if (auto n = parse_number(lit->text)) return Value(*n);
      } else if (lt->base == "boolean") {
        if (lit->text == "true") return Value(true);
        if (lit->text == "false") return Value(false);
      }
    }
    return Value(lit->text);
  }
  if (const auto* bb = std::get_if<wps::BBoxVal>(&v))
    return Value(format_number(bb->minx) + "," + format_number(bb->miny) + "," + format_number(bb->maxx) + "," +
                 format_number(bb->maxy));
  if (const auto* ref = std::get_if<wps::ComplexRef>(&v)) {
    // a link to the caller's own file: hand the scenario the store path
    const std::string prefix = executor_.config().public_base_url + "/files/";
    if (ref->href.rfind(prefix, 0) == 0)
      if (auto link = links_.get(ref->href.substr(prefix.size())); link && link->user == ctx.user)
        return Value(link->file);
  }
  std::string path = "inputs/" + ctx.instance_id + "/" + param.decl.identifier;
  store_.put_file(ctx.user, path, ctx.fetch(v));
  return Value(path);
}

std::vector<exec::RunnerOutput> ScenarioBackend::run(const ProcessDescriptor& desc,
                                                     const std::vector<wps::NamedValue>& inputs,
                                                     exec::RunContext& ctx) {
  auto prog = program_for(desc);
  std::vector<Value> args;
  for (const auto& p : prog->declared_inputs) {
    auto it = std::find_if(inputs.begin(), inputs.end(), [&](const auto& nv) { return nv.first == p.decl.identifier; });
    args.push_back(it == inputs.end() ? Value() : input_arg(p, it->second, ctx));
  }
  for (const auto& p : prog->declared_outputs) {
    auto dest = ctx.output_dests.find(p.decl.identifier);
    args.push_back(dest == ctx.output_dests.end() ? Value() : Value(dest->second));
  }

  ExecutorScenarioHost host(executor_, catalog_, store_, ctx.user, ctx.instance_id);
  Interpreter interp(prog->ast, &host, budget_, ctx.cancelled);
  interp.on_log([&ctx](const std::string& line) { ctx.log("script", line); });
  ctx.progress(0);
  RunResult result = interp.run(prog->entry_function, std::move(args));

  std::vector<exec::RunnerOutput> outputs;
  std::vector<const BoundParam*> literal_outputs;
  for (const auto& p : prog->declared_outputs)
    if (!std::holds_alternative<wps::ComplexType>(p.decl.dtype)) literal_outputs.push_back(&p);
  const Object* returned = result.value.object();
  for (const auto& p : prog->declared_outputs) {
    const std::string& id = p.decl.identifier;
    if (std::holds_alternative<wps::ComplexType>(p.decl.dtype)) {
      outputs.push_back({id, exec::StoredFile{ctx.output_dests.at(id)}});
      continue;
    }
    const Value* v = returned ? returned->find(id) : nullptr;
    if (!v && !returned && literal_outputs.size() == 1) v = &result.value;
    if (!v) throw ScriptError({0, 0}, "scenario did not return a value for output '" + id + "'");
    outputs.push_back({id, wps::InputValue{wps::LiteralVal{to_display(*v)}}});
  }
  return outputs;
}

}  // namespace wpsenv::script
