#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace wpsenv {

/// Shortest digits that parse back to exactly `v`, laid out as JavaScript
/// prints numbers: fixed notation for 1e-7 < |v| < 1e21 ("5", "0.001",
/// "1000000"), exponent form otherwise ("1e+21", "1.5e-7"). Non-finite
/// values print as "Infinity", "-Infinity" and "NaN".
std::string format_number(double v);

/// Strict decimal parse of the whole string (optional sign, fraction and
/// exponent). Leading/trailing whitespace is rejected.
std::optional<double> parse_number(std::string_view text);

}  // namespace wpsenv
