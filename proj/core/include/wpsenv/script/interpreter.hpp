#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wpsenv/script/ast.hpp"
#include "wpsenv/script/value.hpp"

namespace wpsenv::script {

struct RunBudget {
  std::uint64_t max_steps = 10'000'000;
  std::chrono::milliseconds max_wall{3'600'000};
  unsigned max_call_depth = 128;
};

/// What the interpreter needs from the outside world. Calls may arrive from
/// spawned tasks concurrently.
class ScenarioHost {
 public:
  virtual ~ScenarioHost() = default;
  /// Arity of the wrapper, or nullopt if no such wrapper exists.
  virtual std::optional<std::size_t> wrapper_arity(const std::string& name) = 0;
  virtual Value call_wrapper(const std::string& name, const std::vector<Value>& args) = 0;
  virtual Value call_wps(const std::string& endpoint, const std::string& process_id, const Object& inputs) = 0;
};

/// Builtin names and their fixed arities.
const std::map<std::string, std::size_t, std::less<>>& builtin_arities();

/// Global constant naming the environment's own endpoint.
inline constexpr const char* kLocalConstant = "LOCAL";

/// Checks every call site whose callee is a plain name: it must be a user
/// function, builtin or (when a host is given) a wrapper, called with its
/// exact arity. Runs before evaluation so that no service is invoked for a
/// program that cannot complete.
void check_calls(const Program& program, ScenarioHost* host);

struct RunResult {
  Value value;
  std::vector<std::string> log;
  std::uint64_t steps = 0;
};

/// One evaluation. Not shareable across threads; each run owns its heap.
class Interpreter {
 public:
  Interpreter(std::shared_ptr<const Program> program, ScenarioHost* host, RunBudget budget = {},
              const std::atomic<bool>* cancelled = nullptr);

  /// log lines are forwarded as they happen, in addition to RunResult::log
  void on_log(std::function<void(const std::string&)> sink) { log_sink_ = std::move(sink); }

  RunResult run(const std::string& entry, std::vector<Value> args);

 private:
  struct Frame;

  Value call_function(const FunctionDecl& fn, std::vector<Value> args, Pos pos);
  Value call_builtin(const std::string& name, std::vector<Value>& args, Pos pos);

  enum class Flow { Normal, Return };
  Flow exec_block(const Block& b, Frame& f);
  Flow exec(const Stmt& s, Frame& f);
  Value eval(const Expr& e, Frame& f);
  Value eval_binary(const Binary& b, Pos pos, Frame& f);
  void assign(const Expr& target, Value v, Frame& f);
  void step();
  void charge(std::uint64_t n);

  std::shared_ptr<const Program> program_;
  ScenarioHost* host_;
  RunBudget budget_;
  const std::atomic<bool>* cancelled_;
  std::function<void(const std::string&)> log_sink_;

  std::uint64_t steps_ = 0;
  unsigned depth_ = 0;
  std::chrono::steady_clock::time_point started_;
  std::vector<std::string> log_;
};

}  // namespace wpsenv::script
