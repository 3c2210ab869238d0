#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "wpsenv/gateway/environment.hpp"

namespace wpsenv::gateway {

/// bearer token -> user
using TokenTable = std::map<std::string, std::string>;

/// Reads `{"tokens": {"<token>": "<user>"}}`; a missing file yields an
/// empty table.
TokenTable load_tokens(const std::filesystem::path& users_json);

/// User name that WPS-protocol executions run under.
inline constexpr const char* kWpsUser = "_wps";

/// HTTP front door: WPS protocol under /wps, one-time files under /files,
/// REST under /api.
class Gateway {
 public:
  Gateway(Environment& env, TokenTable tokens, std::size_t threads = 32);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and serves on a background thread. Throws NetworkError when the
  /// address cannot be bound.
  void start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wpsenv::gateway
