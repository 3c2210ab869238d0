#include "support.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wpsenv/mock/grid.hpp"

namespace wpsenv::test {

namespace {
// library chatter drowns test output; WPSENV_TEST_LOG=debug brings it back
const bool kQuiet = [] {
  const char* lvl = std::getenv("WPSENV_TEST_LOG");
  spdlog::set_level(lvl ? spdlog::level::from_str(lvl) : spdlog::level::err);
  return true;
}();
}  // namespace


namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto p = fs::temp_directory_path() / ("wpsenv-test-" + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create a temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixture_path(const std::string& name) { return fs::path(WPSENV_FIXTURE_DIR) / name; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_fixture(const std::string& name) { return read_file(fixture_path(name)); }

int free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    throw std::runtime_error("bind");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  int port = ntohs(addr.sin_port);
  ::close(fd);
  return port;
}

LiveServer::LiveServer() : LiveServer(Options{}) {}

LiveServer::LiveServer(Options opts) {
  gateway::TokenTable tokens{{"tok-alice", "alice"}, {"tok-bob", "bob"}};
  // the port probe can race with other processes; retry a few times
  for (int attempt = 0;; ++attempt) {
    port_ = free_port();
    base_ = "http://127.0.0.1:" + std::to_string(port_);
    gateway::ApiConfig cfg;
    cfg.bind_addr = "127.0.0.1:" + std::to_string(port_);
    cfg.data_dir = dir_.path() / ("data" + std::to_string(attempt));
    cfg.poll_interval_ms = opts.poll_interval_ms;
    cfg.link_max_downloads = opts.link_max_downloads;
    env_ = std::make_unique<gateway::Environment>(cfg, opts.budget);
    gateway_ = std::make_unique<gateway::Gateway>(*env_, tokens, opts.threads);
    try {
      gateway_->start("127.0.0.1", port_);
      return;
    } catch (const NetworkError&) {
      gateway_.reset();
      env_.reset();
      if (attempt >= 5) throw;
    }
  }
}

LiveServer::~LiveServer() {
  if (gateway_) gateway_->stop();
  gateway_.reset();
  env_.reset();
}

httplib::Client LiveServer::client() const {
  httplib::Client c("127.0.0.1", port_);
  c.set_read_timeout(std::chrono::seconds(60));
  return c;
}

namespace {
LiveServer::Reply reply(const httplib::Result& r) {
  if (!r) throw std::runtime_error("request failed: " + httplib::to_string(r.error()));
  return {r->status, r->body};
}
httplib::Headers auth(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }
}  // namespace

LiveServer::Reply LiveServer::get(const std::string& path, const std::string& token) const {
  return reply(client().Get(path, auth(token)));
}

LiveServer::Reply LiveServer::post(const std::string& path, const nlohmann::json& body, const std::string& token) const {
  return reply(client().Post(path, auth(token), body.dump(), "application/json"));
}

LiveServer::Reply LiveServer::put(const std::string& path, const std::string& bytes, const std::string& token) const {
  return reply(client().Put(path, auth(token), bytes, "application/octet-stream"));
}

LiveServer::Reply LiveServer::del(const std::string& path, const std::string& token) const {
  return reply(client().Delete(path, auth(token)));
}

LiveServer::Reply LiveServer::raw_get(const std::string& path) const { return reply(client().Get(path)); }

LiveServer::Reply LiveServer::raw_post(const std::string& path, const std::string& body,
                                       const std::string& content_type) const {
  return reply(client().Post(path, body, content_type));
}

void LiveServer::seed_fixtures(const std::string& user) {
  for (const char* f : {"points.csv", "roads.csv", "grid_spec.asc"})
    env_->store().put_file(user, std::string("in/") + f, read_fixture(f));
}

std::vector<std::vector<double>> grid_rows(const std::string& asc_text) {
  auto g = mock::read_grid(asc_text);
  std::vector<std::vector<double>> rows(g.nrows);
  for (std::size_t r = 0; r < g.nrows; ++r)
    for (std::size_t c = 0; c < g.ncols; ++c) rows[r].push_back(g.at(r, c));
  return rows;
}

}  // namespace wpsenv::test
