#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wpsenv/catalog/catalog.hpp"
#include "wpsenv/exec/executor.hpp"
#include "wpsenv/script/interpreter.hpp"

namespace wpsenv::script {

/// Import/export form of a scenario.
struct ScenarioPackage {
  std::string name;
  std::string description;
  std::string wrapper_name;
  std::string entry_function;
  std::vector<catalog::BoundParam> inputs;
  std::vector<catalog::BoundParam> outputs;
  std::string source;
};

void to_json(nlohmann::json& j, const ScenarioPackage& p);
void from_json(const nlohmann::json& j, ScenarioPackage& p);

struct ScenarioProgram {
  std::string source;
  std::shared_ptr<const Program> ast;
  std::vector<catalog::BoundParam> declared_inputs;
  std::vector<catalog::BoundParam> declared_outputs;
  std::string entry_function;
  std::string local_id;
  std::string wrapper_name;
};

/// Parses and checks a package: entry arity equals inputs + outputs, each
/// widget fits its data type, and every call site resolves with the right
/// arity (wrappers through `host` when given).
ScenarioProgram compile_scenario(const ScenarioPackage& pkg, ScenarioHost* host = nullptr);

/// Answers wrapper arities from the catalog; cannot execute anything.
class CatalogResolver : public ScenarioHost {
 public:
  explicit CatalogResolver(const catalog::Catalog& catalog) : catalog_(catalog) {}
  std::optional<std::size_t> wrapper_arity(const std::string& name) override;
  Value call_wrapper(const std::string& name, const std::vector<Value>& args) override;
  Value call_wps(const std::string& endpoint, const std::string& process_id, const Object& inputs) override;

 private:
  const catalog::Catalog& catalog_;
};

/// Compiles against the catalog's wrappers and registers a Scenario
/// descriptor. Nothing is registered on error.
catalog::ProcessDescriptor publish_scenario(catalog::Catalog& catalog, const ScenarioPackage& pkg,
                                            const std::string& owner);

/// Runs wrapper and CallWPS calls as child instances of `parent_id`, under
/// the parent's user.
class ExecutorScenarioHost : public CatalogResolver {
 public:
  ExecutorScenarioHost(exec::Executor& executor, const catalog::Catalog& catalog, const store::Datastore& store,
                       std::string user, std::optional<std::string> parent_id);

  Value call_wrapper(const std::string& name, const std::vector<Value>& args) override;
  Value call_wps(const std::string& endpoint, const std::string& process_id, const Object& inputs) override;

 private:
  catalog::ValidatedValue input_value(const catalog::BoundParam& param, const Value& v) const;
  std::optional<catalog::ValidatedValue> output_value(const catalog::BoundParam& param, const Value& v) const;
  Value run_child(const catalog::ProcessDescriptor& desc, const exec::ParamValues& values);

  exec::Executor& executor_;
  const catalog::Catalog& catalog_;
  const store::Datastore& store_;
  std::string user_;
  std::optional<std::string> parent_id_;
};

/// LocalRunner for published scenarios.
class ScenarioBackend : public exec::LocalRunner {
 public:
  ScenarioBackend(exec::Executor& executor, const catalog::Catalog& catalog, store::Datastore& store,
                  store::LinkRegistry& links, RunBudget budget = {});

  std::vector<exec::RunnerOutput> run(const catalog::ProcessDescriptor& desc, const std::vector<wps::NamedValue>& inputs,
                                      exec::RunContext& ctx) override;

 private:
  std::shared_ptr<const ScenarioProgram> program_for(const catalog::ProcessDescriptor& desc);
  Value input_arg(const catalog::BoundParam& param, const wps::InputValue& v, exec::RunContext& ctx);

  exec::Executor& executor_;
  const catalog::Catalog& catalog_;
  store::Datastore& store_;
  store::LinkRegistry& links_;
  RunBudget budget_;
  std::mutex cache_mutex_;
  std::map<std::string, std::shared_ptr<const ScenarioProgram>> cache_;  // keyed by local_id + source
};

}  // namespace wpsenv::script
