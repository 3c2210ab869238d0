#pragma once

#include <memory>

#include "wpsenv/catalog/catalog.hpp"
#include "wpsenv/exec/executor.hpp"
#include "wpsenv/gateway/config.hpp"
#include "wpsenv/script/interpreter.hpp"
#include "wpsenv/store/datastore.hpp"
#include "wpsenv/store/links.hpp"

namespace wpsenv::gateway {

/// Everything a running server owns, wired together. Layout under data_dir:
/// users/{user}/ (user files), catalog.json, instances.jsonl, users.json.
class Environment {
 public:
  explicit Environment(ApiConfig config, script::RunBudget budget = {});
  ~Environment();
  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;

  const ApiConfig& config() const { return config_; }
  store::Datastore& store() { return store_; }
  store::LinkRegistry& links() { return links_; }
  catalog::Catalog& catalog() { return catalog_; }
  exec::Executor& executor() { return *executor_; }

 private:
  ApiConfig config_;
  store::Datastore store_;
  store::LinkRegistry links_;
  catalog::Catalog catalog_;
  std::unique_ptr<exec::Executor> executor_;
};

}  // namespace wpsenv::gateway
