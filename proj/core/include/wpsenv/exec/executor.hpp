#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wpsenv/catalog/descriptor.hpp"
#include "wpsenv/catalog/validation.hpp"
#include "wpsenv/exec/instance.hpp"
#include "wpsenv/store/datastore.hpp"
#include "wpsenv/store/links.hpp"

namespace wpsenv::exec {

struct ExecutorConfig {
  std::string public_base_url = "http://127.0.0.1:8080";
  std::chrono::milliseconds poll_interval{1000};
  std::chrono::milliseconds poll_cap{30000};
  double poll_backoff = 1.5;
  std::chrono::seconds job_timeout{86400};
  /// instances.jsonl; empty disables persistence
  std::filesystem::path journal;
  unsigned max_nesting = 16;
};

using ParamValues = std::vector<std::pair<std::string, catalog::ValidatedValue>>;

/// Where a run should leave one output. Complex outputs without a
/// destination land under results/{instance}/{param}.
struct OutputTarget {
  std::string param_id;
  std::optional<std::string> dest;
};

/// What a local runner hands back for one output.
struct RunnerOutput {
  std::string param_id;
  std::variant<wps::InputValue, StoredFile> value;
};

/// Services a local runner gets while executing inside an instance.
struct RunContext {
  std::string instance_id;
  std::string user;
  /// destination path per complex output, already decided by the executor
  std::map<std::string, std::string> output_dests;
  std::function<std::string(const wps::InputValue&)> fetch;
  std::function<void(int percent)> progress;
  std::function<void(std::string_view level, std::string text)> log;
  const std::atomic<bool>* cancelled = nullptr;

  bool is_cancelled() const { return cancelled && cancelled->load(); }
};

/// Executes LocalBuiltin or Scenario descriptors in-process.
class LocalRunner {
 public:
  virtual ~LocalRunner() = default;
  virtual std::vector<RunnerOutput> run(const catalog::ProcessDescriptor& desc, const std::vector<wps::NamedValue>& inputs,
                                        RunContext& ctx) = 0;
};

/// Turns validated values into WPS inputs, runs services and keeps the
/// instance registry. Each instance is driven by exactly one task; readers
/// get copies.
class Executor {
 public:
  Executor(ExecutorConfig config, store::Datastore& store, store::LinkRegistry& links);
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  void set_runner(catalog::ProcessKind kind, std::shared_ptr<LocalRunner> runner);

  /// Input values in descriptor order. Files become one-time link
  /// references, extents EPSG:4326 boxes, tables opaque dsn:// tokens (local
  /// builtins only), everything else canonical literal text.
  std::vector<wps::NamedValue> marshal_inputs(const catalog::ProcessDescriptor& desc, const ParamValues& values,
                                              const std::string& instance_id, const std::string& user);

  /// Registers an instance, then runs it inline (Sync) or on a background
  /// task (Async). Failures of the run are recorded on the instance; only
  /// marshaling errors are thrown.
  std::string execute(const catalog::ProcessDescriptor& desc, const ParamValues& values, const std::string& user,
                      Mode mode, std::optional<std::string> parent_id = std::nullopt);

  /// Polls the instance's statusLocation until a terminal status. Throws
  /// TimeoutError after the job timeout (instance marked Failed("timeout")).
  wps::ExecuteStatus poll_until_terminal(const std::string& instance_id);

  /// Places the outputs reported by the service: references are downloaded
  /// into the store, inline payloads written, literals recorded. Ends by
  /// terminating the instance's links.
  std::vector<ResultRecord> collect_results(const std::string& instance_id, const std::vector<OutputTarget>& targets);

  /// Failed("cancelled") plus link termination; false if already terminal.
  bool cancel(const std::string& instance_id);

  std::optional<ExecutionInstance> get(const std::string& instance_id) const;
  /// Blocks until the instance is terminal.
  ExecutionInstance wait(const std::string& instance_id) const;
  std::vector<ExecutionInstance> list(const std::optional<std::string>& user = std::nullopt) const;
  bool is_live(const std::string& instance_id) const;

  const ExecutorConfig& config() const { return config_; }

 private:
  struct Job;

  std::shared_ptr<Job> job(const std::string& id) const;
  void run_job(const std::shared_ptr<Job>& job);
  void run_remote(Job& job);
  void run_local(Job& job, LocalRunner& runner);
  std::string fetch_input(const wps::InputValue& v);

  bool transition(Job& job, const wps::StatusState& next);
  void append_log(Job& job, std::string_view level, std::string text);
  void finish(Job& job);
  void persist(const ExecutionInstance& snapshot);
  void replay_journal();

  ExecutorConfig config_;
  store::Datastore& store_;
  store::LinkRegistry& links_;

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::map<catalog::ProcessKind, std::shared_ptr<LocalRunner>> runners_;
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> exited;
  };
  std::vector<Worker> workers_;
  bool shutting_down_ = false;

  std::mutex journal_mutex_;
};

}  // namespace wpsenv::exec
