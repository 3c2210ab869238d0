#include "wpsenv/wps/client.hpp"

#include <httplib.h>

#include "wpsenv/error.hpp"
#include "wpsenv/url.hpp"
#include "wpsenv/wps/codec.hpp"

namespace wpsenv::wps {

namespace {

Url require_url(const std::string& url) {
  auto u = Url::parse(url);
  if (!u) throw NetworkError("not an absolute http URL: " + url);
  if (u->scheme != "http") throw NetworkError("only plain http is supported: " + url);
  return *u;
}

httplib::Client make_client(const Url& u, std::chrono::seconds timeout) {
  httplib::Client cli(u.host, u.port);
  cli.set_connection_timeout(std::chrono::seconds(10));
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  cli.set_follow_location(true);
  return cli;
}

HttpResult to_result(const httplib::Result& res, const std::string& url) {
  if (!res) throw NetworkError("request to " + url + " failed: " + httplib::to_string(res.error()));
  return HttpResult{res->status, res->body, res->get_header_value("Content-Type")};
}

std::string append_query(const std::string& endpoint, const std::string& query) {
  return endpoint + (endpoint.find('?') == std::string::npos ? "?" : "&") + query;
}

/// Turns a non-200 answer into an exception; exception reports keep their
/// text.
template <typename Err>
void check_answer(const HttpResult& r, const std::string& url) {
  if (r.status == 200) return;
  std::optional<ExceptionReport> rep;
  try {
    rep = parse_exception_report(r.body);
  } catch (const ProtocolError&) {
  }
  if (rep) throw Err("remote exception " + rep->code + ": " + rep->text);
  throw NetworkError("HTTP " + std::to_string(r.status) + " from " + url);
}

}  // namespace

HttpResult http_get(const std::string& url, std::chrono::seconds timeout) {
  Url u = require_url(url);
  auto cli = make_client(u, timeout);
  return to_result(cli.Get(u.target), url);
}

HttpResult http_post(const std::string& url, const std::string& body, const std::string& content_type,
                     std::chrono::seconds timeout) {
  Url u = require_url(url);
  auto cli = make_client(u, timeout);
  return to_result(cli.Post(u.target, body, content_type), url);
}

std::string fetch_bytes(const std::string& url) {
  auto r = http_get(url);
  if (r.status != 200) throw NetworkError("HTTP " + std::to_string(r.status) + " fetching " + url);
  return std::move(r.body);
}

CapabilitiesDoc Client::get_capabilities() const {
  std::string url = append_query(endpoint_, "service=WPS&version=1.0.0&request=GetCapabilities");
  auto r = http_get(url);
  check_answer<ProtocolError>(r, url);
  return parse_capabilities(r.body);
}

ProcessDescription Client::describe_process(const std::string& identifier) const {
  std::string url =
      append_query(endpoint_, "service=WPS&version=1.0.0&request=DescribeProcess&identifier=" + url_encode(identifier));
  auto r = http_get(url);
  check_answer<ProtocolError>(r, url);
  return parse_process_description(r.body);
}

ExecuteResponse Client::execute(const ExecuteRequest& req) const {
  auto r = http_post(endpoint_, encode_execute(req), "text/xml");
  check_answer<RemoteFault>(r, endpoint_);
  if (auto rep = parse_exception_report(r.body)) throw RemoteFault("remote exception " + rep->code + ": " + rep->text);
  return parse_execute_response(r.body);
}

ExecuteResponse fetch_status(const std::string& status_location) {
  auto r = http_get(status_location);
  check_answer<RemoteFault>(r, status_location);
  if (auto rep = parse_exception_report(r.body)) throw RemoteFault("remote exception " + rep->code + ": " + rep->text);
  return parse_execute_response(r.body);
}

}  // namespace wpsenv::wps
