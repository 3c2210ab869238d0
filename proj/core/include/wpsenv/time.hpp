#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace wpsenv {

using Clock = std::chrono::system_clock;
using Instant = std::chrono::time_point<Clock, std::chrono::milliseconds>;

inline Instant now_utc() { return std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now()); }

/// ISO-8601 UTC with millisecond precision, e.g. "2026-10-15T08:30:00.125Z".
std::string format_instant(Instant t);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff...]Z" (or "+00:00"). Sub-millisecond
/// digits are truncated.
std::optional<Instant> parse_instant(std::string_view text);

}  // namespace wpsenv
