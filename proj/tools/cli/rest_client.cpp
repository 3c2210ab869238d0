#include "rest_client.hpp"

#include <httplib.h>

namespace wpsenv::cli {

using nlohmann::json;

std::string encode_path(const std::string& path) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : path) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

RestClient::RestClient(std::string server, std::string token) : server_(std::move(server)), token_(std::move(token)) {
  while (!server_.empty() && server_.back() == '/') server_.pop_back();
}

RestClient::Response RestClient::send(const std::string& method, const std::string& path, const std::string& body,
                                      const std::string& content_type) const {
  httplib::Client cli(server_);
  if (!cli.is_valid()) throw CommandError(2, "invalid server URL " + server_);
  cli.set_connection_timeout(std::chrono::seconds(10));
  cli.set_read_timeout(std::chrono::hours(24));
  httplib::Headers headers{{"Authorization", "Bearer " + token_}};
  httplib::Result res;
  if (method == "GET")
    res = cli.Get(path, headers);
  else if (method == "POST")
    res = cli.Post(path, headers, body, content_type);
  else if (method == "PUT")
    res = cli.Put(path, headers, body, content_type);
  else
    res = cli.Delete(path, headers);
  if (!res) throw CommandError(2, "cannot reach " + server_ + ": " + httplib::to_string(res.error()));
  Response r{res->status, res->body};
  if (r.status >= 200 && r.status < 300) return r;

  std::string code = "http_" + std::to_string(r.status);
  std::string reason = r.body;
  try {
    auto j = json::parse(r.body);
    code = j.value("error", code);
    reason = j.value("reason", reason);
    if (j.contains("widget") && !j["widget"].get<std::string>().empty())
      reason = j["widget"].get<std::string>() + ": " + reason;
    if (j.contains("line")) reason = "line " + j["line"].dump() + ", col " + j["col"].dump() + ": " + reason;
  } catch (const json::exception&) {
  }
  int exit = 1;
  if (code == "remote_fault")
    exit = 3;
  else if (code == "network_error" || code == "protocol_error" || code == "timeout" || r.status >= 500)
    exit = 2;
  throw CommandError(exit, code + ": " + reason);
}

json RestClient::parse_json(const Response& r) {
  if (r.body.empty()) return json();
  try {
    return json::parse(r.body);
  } catch (const json::exception& e) {
    throw CommandError(2, std::string("server sent malformed JSON: ") + e.what());
  }
}

json RestClient::get(const std::string& path) const { return parse_json(send("GET", path, "", "")); }

json RestClient::post(const std::string& path, const json& body) const {
  return parse_json(send("POST", path, body.dump(), "application/json"));
}

std::string RestClient::get_bytes(const std::string& path) const { return send("GET", path, "", "").body; }

json RestClient::put_bytes(const std::string& path, const std::string& bytes) const {
  return parse_json(send("PUT", path, bytes, "application/octet-stream"));
}

void RestClient::del(const std::string& path) const { send("DELETE", path, "", ""); }

}  // namespace wpsenv::cli
