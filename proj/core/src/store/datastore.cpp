#include "wpsenv/store/datastore.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "wpsenv/error.hpp"
#include "wpsenv/wps/client.hpp"

namespace wpsenv::store {

namespace fs = std::filesystem;

namespace {

std::uint64_t tree_size(const fs::path& dir) {
  std::uint64_t total = 0;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return 0;
  for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file(ec)) total += it->file_size(ec);
  }
  return total;
}

std::string staging_name() {
  static std::atomic<std::uint64_t> counter{0};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  return "stage-" + std::to_string(counter++) + "-" + std::to_string(rng());
}

}  // namespace

Datastore::Datastore(fs::path root, std::uint64_t default_quota)
    : root_(std::move(root)), default_quota_(default_quota) {
  fs::create_directories(root_ / ".staging");
}

std::string Datastore::normalize(std::string_view user_path) {
  std::string raw(user_path);
  if (raw.find('\0') != std::string::npos) throw ValidationError("path contains NUL");
  if (raw.find('\\') != std::string::npos) throw ValidationError("path contains a backslash");
  while (!raw.empty() && raw.front() == '/') raw.erase(0, 1);
  if (raw.empty()) throw ValidationError("empty path");
  fs::path p = fs::path(raw).lexically_normal();
  std::string out = p.generic_string();
  while (!out.empty() && out.back() == '/') out.pop_back();
  if (out.empty() || out == ".") throw ValidationError("empty path");
  if (out == ".." || out.rfind("../", 0) == 0) throw ValidationError("path escapes the user store: " + std::string(user_path));
  return out;
}

void Datastore::check_user(std::string_view user) {
  if (user.empty() || user.size() > 64 || user.front() == '.')
    throw ValidationError("invalid user name");
  for (char c : user)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      throw ValidationError("invalid user name");
}

fs::path Datastore::user_root(const std::string& user) const {
  check_user(user);
  return root_ / user;
}

fs::path Datastore::resolve(const std::string& user, std::string_view path) const {
  return user_root(user) / normalize(path);
}

Datastore::UserState& Datastore::state(const std::string& user) const {
  check_user(user);
  std::lock_guard lock(users_mutex_);
  auto& slot = users_[user];
  if (!slot) {
    slot = std::make_unique<UserState>();
    slot->quota = default_quota_;
    slot->used = tree_size(root_ / user);
  }
  return *slot;
}

FileStat Datastore::put_file(const std::string& user, std::string_view path, std::string_view bytes) {
  fs::path target = resolve(user, path);
  std::string rel = normalize(path);
  auto& st = state(user);
  std::lock_guard lock(st.mutex);

  std::error_code ec;
  if (fs::is_directory(target, ec)) throw ValidationError("path names a directory: " + rel);
  std::uint64_t old_size = fs::is_regular_file(target, ec) ? fs::file_size(target, ec) : 0;
  bool overwrite = fs::exists(target, ec);
  std::uint64_t after = st.used - old_size + bytes.size();
  if (after > st.quota)
    throw QuotaExceeded("quota of " + std::to_string(st.quota) + " bytes exceeded for " + user + " writing " + rel);

  // a parent component that exists as a file cannot become a directory
  for (fs::path parent = target.parent_path(); parent != user_root(user) && !parent.empty();
       parent = parent.parent_path())
    if (fs::is_regular_file(parent, ec)) throw ValidationError("parent of " + rel + " is a file");
  fs::create_directories(target.parent_path());

  fs::path tmp = root_ / ".staging" / staging_name();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IllegalState("cannot write staging file for " + rel);
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IllegalState("cannot move " + rel + " into place: " + ec.message());
  }
  if (overwrite) spdlog::warn("overwrote {}:{}", user, rel);
  st.used = after;
  return FileStat{rel, bytes.size()};
}

std::string Datastore::read_file(const std::string& user, std::string_view path) const {
  fs::path target = resolve(user, path);
  std::error_code ec;
  if (!fs::is_regular_file(target, ec)) throw NotFound("no such file: " + normalize(path));
  std::ifstream in(target, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in && !in.eof()) throw NotFound("cannot read " + normalize(path));
  return std::move(ss).str();
}

bool Datastore::exists(const std::string& user, std::string_view path) const {
  std::error_code ec;
  return fs::is_regular_file(resolve(user, path), ec);
}

bool Datastore::is_dir(const std::string& user, std::string_view path) const {
  std::error_code ec;
  return fs::is_directory(resolve(user, path), ec);
}

bool Datastore::remove_file(const std::string& user, std::string_view path) {
  fs::path target = resolve(user, path);
  auto& st = state(user);
  std::lock_guard lock(st.mutex);
  std::error_code ec;
  if (!fs::is_regular_file(target, ec)) return false;
  auto size = fs::file_size(target, ec);
  if (!fs::remove(target, ec)) return false;
  st.used -= std::min<std::uint64_t>(st.used, size);
  return true;
}

std::vector<DirEntry> Datastore::list(const std::string& user, std::string_view dir) const {
  fs::path base = dir.empty() || dir == "/" ? user_root(user) : resolve(user, dir);
  std::error_code ec;
  if (!fs::is_directory(base, ec)) {
    if (dir.empty() || dir == "/") return {};
    throw NotFound("no such directory: " + std::string(dir));
  }
  std::vector<DirEntry> out;
  for (const auto& e : fs::directory_iterator(base, ec)) {
    DirEntry d;
    d.name = e.path().filename().string();
    d.is_dir = e.is_directory(ec);
    d.size = d.is_dir ? 0 : e.file_size(ec);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const DirEntry& a, const DirEntry& b) { return a.name < b.name; });
  return out;
}

FileStat Datastore::fetch_remote_result(const std::string& url, const std::string& user, std::string_view dest) {
  normalize(dest);
  std::string body = wps::fetch_bytes(url);
  return put_file(user, dest, body);
}

std::uint64_t Datastore::used_bytes(const std::string& user) const {
  auto& st = state(user);
  std::lock_guard lock(st.mutex);
  return st.used;
}

std::uint64_t Datastore::quota(const std::string& user) const {
  auto& st = state(user);
  std::lock_guard lock(st.mutex);
  return st.quota;
}

void Datastore::set_quota(const std::string& user, std::uint64_t bytes) {
  auto& st = state(user);
  std::lock_guard lock(st.mutex);
  st.quota = bytes;
}

}  // namespace wpsenv::store
