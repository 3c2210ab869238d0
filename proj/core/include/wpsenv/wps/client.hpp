#pragma once

#include <chrono>
#include <string>

#include "wpsenv/wps/types.hpp"

namespace wpsenv::wps {

struct HttpResult {
  int status = 0;
  std::string body;
  std::string content_type;
};

/// Blocking HTTP GET/POST. Throws NetworkError on connection failure or a
/// malformed URL; any HTTP status is returned to the caller.
HttpResult http_get(const std::string& url, std::chrono::seconds timeout = std::chrono::seconds(60));
HttpResult http_post(const std::string& url, const std::string& body, const std::string& content_type,
                     std::chrono::seconds timeout = std::chrono::seconds(60));

/// GET that insists on a 200 answer; returns the body.
std::string fetch_bytes(const std::string& url);

/// Client for one remote WPS 1.0.0 endpoint. KVP GET for GetCapabilities
/// and DescribeProcess, XML POST for Execute.
class Client {
 public:
  explicit Client(std::string endpoint) : endpoint_(std::move(endpoint)) {}

  CapabilitiesDoc get_capabilities() const;
  ProcessDescription describe_process(const std::string& identifier) const;
  /// Remote exception reports surface as RemoteFault.
  ExecuteResponse execute(const ExecuteRequest& req) const;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
};

/// GET a statusLocation document.
ExecuteResponse fetch_status(const std::string& status_location);

}  // namespace wpsenv::wps
