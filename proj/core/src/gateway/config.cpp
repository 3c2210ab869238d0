#include "wpsenv/gateway/config.hpp"

#include <charconv>
#include <cstdlib>

#include "wpsenv/error.hpp"
#include "wpsenv/url.hpp"

namespace wpsenv::gateway {

namespace {

unsigned parse_unsigned(const char* name, const char* text) {
  unsigned v = 0;
  std::string_view s(text);
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ValidationError(std::string(name) + " must be a non-negative integer, got '" + text + "'");
  return v;
}

}  // namespace

std::string ApiConfig::host() const {
  auto colon = bind_addr.rfind(':');
  return colon == std::string::npos ? bind_addr : bind_addr.substr(0, colon);
}

int ApiConfig::port() const {
  auto colon = bind_addr.rfind(':');
  if (colon == std::string::npos) return 8080;
  int p = -1;
  std::string_view s(bind_addr);
  s.remove_prefix(colon + 1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), p);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return -1;
  return p;
}

std::string ApiConfig::base_url() const {
  std::string url = public_base_url.empty() ? "http://" + bind_addr : public_base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

void ApiConfig::validate() const {
  if (host().empty()) throw ValidationError("bind address needs a host: '" + bind_addr + "'");
  if (port() < 0 || port() > 65535) throw ValidationError("bind address has a bad port: '" + bind_addr + "'");
  if (!Url::parse(base_url())) throw ValidationError("public base URL must be an absolute http URL: '" + base_url() + "'");
  if (poll_interval_ms == 0) throw ValidationError("poll interval must be positive");
  if (link_max_downloads == 0) throw ValidationError("link max downloads must be positive");
  if (job_timeout_s == 0) throw ValidationError("job timeout must be positive");
}

ApiConfig ApiConfig::from_env(const std::function<const char*(const char*)>& getenv) {
  ApiConfig c;
  if (const char* v = getenv("WPSENV_BIND_ADDR"); v && *v) c.bind_addr = v;
  if (const char* v = getenv("WPSENV_DATA_DIR"); v && *v) c.data_dir = v;
  if (const char* v = getenv("WPSENV_PUBLIC_BASE_URL"); v && *v) c.public_base_url = v;
  if (const char* v = getenv("WPSENV_POLL_INTERVAL_MS"); v && *v)
    c.poll_interval_ms = parse_unsigned("WPSENV_POLL_INTERVAL_MS", v);
  if (const char* v = getenv("WPSENV_LINK_MAX_DOWNLOADS"); v && *v)
    c.link_max_downloads = parse_unsigned("WPSENV_LINK_MAX_DOWNLOADS", v);
  if (const char* v = getenv("WPSENV_JOB_TIMEOUT_S"); v && *v) c.job_timeout_s = parse_unsigned("WPSENV_JOB_TIMEOUT_S", v);
  c.validate();
  return c;
}

ApiConfig ApiConfig::from_env() {
  return from_env([](const char* name) { return std::getenv(name); });
}

}  // namespace wpsenv::gateway
