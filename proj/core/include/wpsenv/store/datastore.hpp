#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "wpsenv/time.hpp"

namespace wpsenv::store {

inline constexpr std::uint64_t kDefaultQuota = 256ull * 1024 * 1024;

struct FileStat {
  std::string path;  // normalized, user-relative
  std::uint64_t size = 0;
};

struct DirEntry {
  std::string name;
  bool is_dir = false;
  std::uint64_t size = 0;
};

/// Per-user file trees under `root/{user}` with byte quotas. Every path is
/// user-relative and normalized; nothing can resolve outside the user's
/// root.
class Datastore {
 public:
  explicit Datastore(std::filesystem::path root, std::uint64_t default_quota = kDefaultQuota);

  /// Normalizes a user-relative path. A leading '/' is taken as the store
  /// root. Throws ValidationError on empty paths and traversal escapes.
  static std::string normalize(std::string_view user_path);
  /// Throws ValidationError unless `user` is a safe directory name.
  static void check_user(std::string_view user);

  /// Atomic write (temp file + rename). Overwrites an existing file.
  FileStat put_file(const std::string& user, std::string_view path, std::string_view bytes);
  /// Throws NotFound.
  std::string read_file(const std::string& user, std::string_view path) const;
  bool exists(const std::string& user, std::string_view path) const;
  bool is_dir(const std::string& user, std::string_view path) const;
  /// Removes a file; returns false when absent.
  bool remove_file(const std::string& user, std::string_view path);
  /// Empty `dir` lists the user root. Throws NotFound for missing dirs.
  std::vector<DirEntry> list(const std::string& user, std::string_view dir) const;

  /// GET `url` and store the body at `dest` with put_file semantics.
  FileStat fetch_remote_result(const std::string& url, const std::string& user, std::string_view dest);

  std::uint64_t used_bytes(const std::string& user) const;
  std::uint64_t quota(const std::string& user) const;
  void set_quota(const std::string& user, std::uint64_t bytes);

  const std::filesystem::path& root() const { return root_; }

 private:
  struct UserState {
    std::mutex mutex;
    std::uint64_t used = 0;
    std::uint64_t quota = 0;
  };

  UserState& state(const std::string& user) const;
  std::filesystem::path user_root(const std::string& user) const;
  std::filesystem::path resolve(const std::string& user, std::string_view path) const;

  std::filesystem::path root_;
  std::uint64_t default_quota_;
  mutable std::mutex users_mutex_;
  mutable std::map<std::string, std::unique_ptr<UserState>> users_;
};

}  // namespace wpsenv::store
