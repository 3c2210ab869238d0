#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace wpsenv::cli {

/// A failed command. `code` is the process exit code.
struct CommandError : std::runtime_error {
  CommandError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

class RestClient {
 public:
  RestClient(std::string server, std::string token);

  nlohmann::json get(const std::string& path) const;
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
  std::string get_bytes(const std::string& path) const;
  nlohmann::json put_bytes(const std::string& path, const std::string& bytes) const;
  void del(const std::string& path) const;

 private:
  struct Response {
    int status;
    std::string body;
  };
  Response send(const std::string& method, const std::string& path, const std::string& body,
                const std::string& content_type) const;
  static nlohmann::json parse_json(const Response& r);

  std::string server_;
  std::string token_;
};

/// Percent-encodes everything but unreserved characters and '/'.
std::string encode_path(const std::string& path);

}  // namespace wpsenv::cli
