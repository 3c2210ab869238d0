#pragma once

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "wpsenv/gateway/environment.hpp"
#include "wpsenv/gateway/server.hpp"

namespace wpsenv::test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_fixture(const std::string& name);
std::filesystem::path fixture_path(const std::string& name);
std::string read_file(const std::filesystem::path& p);

/// A currently unused TCP port on 127.0.0.1.
int free_port();

/// A full environment (store, catalog with the mock builtins, executor)
/// behind a live gateway on a free port. Tokens: "tok-alice" -> alice,
/// "tok-bob" -> bob.
class LiveServer {
 public:
  struct Options {
    unsigned poll_interval_ms = 50;
    unsigned link_max_downloads = 3;
    script::RunBudget budget{};
    std::size_t threads = 16;
  };
  LiveServer();
  explicit LiveServer(Options opts);
  ~LiveServer();

  gateway::Environment& env() { return *env_; }
  const std::string& base() const { return base_; }
  std::string wps_url() const { return base_ + "/wps"; }
  int port() const { return port_; }

  /// REST call with a bearer token; body parsed as JSON when non-empty.
  struct Reply {
    int status = 0;
    std::string body;
    nlohmann::json json() const { return body.empty() ? nlohmann::json() : nlohmann::json::parse(body); }
  };
  Reply get(const std::string& path, const std::string& token = "tok-alice") const;
  Reply post(const std::string& path, const nlohmann::json& body, const std::string& token = "tok-alice") const;
  Reply put(const std::string& path, const std::string& bytes, const std::string& token = "tok-alice") const;
  Reply del(const std::string& path, const std::string& token = "tok-alice") const;
  /// Raw (unauthenticated) requests for the WPS and /files surfaces.
  Reply raw_get(const std::string& path) const;
  Reply raw_post(const std::string& path, const std::string& body, const std::string& content_type) const;

  /// Uploads points.csv, roads.csv and grid_spec.asc to in/ for `user`.
  void seed_fixtures(const std::string& user = "alice");

 private:
  httplib::Client client() const;

  TempDir dir_;
  int port_ = 0;
  std::string base_;
  std::unique_ptr<gateway::Environment> env_;
  std::unique_ptr<gateway::Gateway> gateway_;
};

/// Grid cells row by row (row 0 northmost).
std::vector<std::vector<double>> grid_rows(const std::string& asc_text);

}  // namespace wpsenv::test
