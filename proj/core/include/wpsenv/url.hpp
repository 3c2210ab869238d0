#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace wpsenv {

/// Absolute http(s) URL split into the pieces cpp-httplib wants.
struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 80;
  std::string target = "/";  // path + query

  /// "scheme://host:port"
  std::string origin() const;
  std::string str() const { return origin() + target; }

  static std::optional<Url> parse(std::string_view text);
};

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);

}  // namespace wpsenv
