#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wpsenv/time.hpp"
#include "wpsenv/wps/types.hpp"

namespace wpsenv::exec {

enum class Mode { Sync, Async };

struct LogEntry {
  Instant at{};
  std::string level;  // "info", "warn", "error", "script"
  std::string text;
  bool operator==(const LogEntry&) const = default;
};

struct LiteralResult {
  std::string text;
  bool operator==(const LiteralResult&) const = default;
};

struct StoredFile {
  std::string path;  // user-relative
  bool operator==(const StoredFile&) const = default;
};

struct ResultRecord {
  std::string param_id;
  std::variant<LiteralResult, StoredFile> value;
  bool operator==(const ResultRecord&) const = default;
};

/// One run of a service or scenario.
struct ExecutionInstance {
  std::string id;
  std::string user;
  std::string target;  // descriptor local_id
  std::optional<std::string> parent_id;
  Mode mode = Mode::Sync;
  wps::ExecuteStatus status;
  std::vector<wps::StatusState> history;  // every recorded status, in order
  Instant submitted_at{};
  std::optional<Instant> finished_at;
  std::optional<std::string> status_location;
  std::vector<wps::NamedValue> marshaled_inputs;
  std::vector<ResultRecord> results;
  std::vector<LogEntry> log;

  bool terminal() const { return status.terminal(); }
  int percent() const;
};

/// Applies the status machine Accepted -> Started* -> (Succeeded | Failed).
/// Returns false (and leaves the instance untouched) for transitions the
/// machine forbids: anything out of a terminal state, back to Accepted, or a
/// Started percent lower than the last one. Repeating the current status is
/// also reported as false.
bool apply_transition(ExecutionInstance& inst, const wps::StatusState& next, Instant at);

std::string describe(const wps::StatusState& s);

void to_json(nlohmann::json& j, const ExecutionInstance& inst);
void from_json(const nlohmann::json& j, ExecutionInstance& inst);
void to_json(nlohmann::json& j, const ResultRecord& r);

}  // namespace wpsenv::exec

namespace wpsenv::wps {
void to_json(nlohmann::json& j, const InputValue& v);
void from_json(const nlohmann::json& j, InputValue& v);
}  // namespace wpsenv::wps
