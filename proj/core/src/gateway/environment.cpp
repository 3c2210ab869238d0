#include "wpsenv/gateway/environment.hpp"

#include "wpsenv/mock/services.hpp"
#include "wpsenv/script/scenario.hpp"

namespace wpsenv::gateway {

namespace {

ApiConfig checked(ApiConfig c) {
  c.validate();
  return c;
}

exec::ExecutorConfig executor_config(const ApiConfig& c) {
  exec::ExecutorConfig e;
  e.public_base_url = c.base_url();
  e.poll_interval = std::chrono::milliseconds(c.poll_interval_ms);
  e.job_timeout = std::chrono::seconds(c.job_timeout_s);
  e.journal = c.data_dir / "instances.jsonl";
  return e;
}

}  // namespace

Environment::Environment(ApiConfig config, script::RunBudget budget)
    : config_(checked(std::move(config))),
      store_(config_.data_dir / "users"),
      links_(store_, config_.link_max_downloads),
      catalog_(config_.data_dir / "catalog.json") {
  mock::register_builtins(catalog_);
  executor_ = std::make_unique<exec::Executor>(executor_config(config_), store_, links_);
  executor_->set_runner(catalog::ProcessKind::LocalBuiltin, std::make_shared<mock::MockRunner>());
  executor_->set_runner(catalog::ProcessKind::Scenario,
                        std::make_shared<script::ScenarioBackend>(*executor_, catalog_, store_, links_, budget));
}

Environment::~Environment() { executor_.reset(); }

}  // namespace wpsenv::gateway
