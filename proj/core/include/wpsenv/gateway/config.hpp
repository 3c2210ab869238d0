#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>

namespace wpsenv::gateway {

struct ApiConfig {
  std::string bind_addr = "127.0.0.1:8080";
  std::filesystem::path data_dir = "wpsenv-data";
  /// empty: derived from bind_addr
  std::string public_base_url;
  unsigned poll_interval_ms = 1000;
  unsigned link_max_downloads = 3;
  unsigned job_timeout_s = 86400;

  std::string host() const;
  int port() const;
  /// public_base_url, or http://{bind_addr} when unset; no trailing '/'
  std::string base_url() const;
  /// Throws ValidationError.
  void validate() const;

  /// Reads WPSENV_BIND_ADDR, WPSENV_DATA_DIR, WPSENV_PUBLIC_BASE_URL,
  /// WPSENV_POLL_INTERVAL_MS, WPSENV_LINK_MAX_DOWNLOADS and
  /// WPSENV_JOB_TIMEOUT_S through `getenv` (defaults for unset ones).
  static ApiConfig from_env(const std::function<const char*(const char*)>& getenv);
  static ApiConfig from_env();
};

}  // namespace wpsenv::gateway
