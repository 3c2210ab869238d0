#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wpsenv/store/datastore.hpp"
#include "wpsenv/time.hpp"

namespace wpsenv::store {

enum class LinkState { Active, Exhausted, Terminated };

std::string_view to_string(LinkState s);

struct OneTimeLink {
  std::string token;  // 32 lowercase hex chars
  std::string instance_id;
  std::string user;
  std::string file;
  unsigned remaining_downloads = 0;
  Instant created_at{};
  LinkState state = LinkState::Active;

  std::string url_path() const { return "/files/" + token; }
};

enum class ServeOutcome { Ok, Gone, NotFound };

struct ServeResult {
  ServeOutcome outcome = ServeOutcome::NotFound;
  std::string bytes;
};

inline constexpr unsigned kDefaultMaxDownloads = 3;
inline constexpr std::chrono::hours kLinkTtl{24};

/// Count-limited download grants bound to execution instances.
class LinkRegistry {
 public:
  /// Answers whether an instance exists and is not terminal.
  using LivenessProbe = std::function<bool(const std::string& instance_id)>;

  explicit LinkRegistry(Datastore& store, unsigned default_max_downloads = kDefaultMaxDownloads,
                        std::chrono::milliseconds ttl = kLinkTtl);

  void set_liveness_probe(LivenessProbe probe);
  void set_clock(std::function<Instant()> clock);

  /// Throws NotFound (missing file), IllegalState (instance terminal or
  /// unknown), ValidationError (max_downloads == 0).
  OneTimeLink mint(const std::string& instance_id, const std::string& user, std::string_view path,
                   std::optional<unsigned> max_downloads = std::nullopt);

  /// Admission and decrement happen under one lock.
  ServeResult serve(const std::string& token);

  /// Terminates every Active link of the instance and refuses later mints
  /// for it. Returns the number of Active -> Terminated transitions.
  std::size_t terminate_instance(const std::string& instance_id);

  std::optional<OneTimeLink> get(const std::string& token) const;
  std::vector<OneTimeLink> links_of(const std::string& instance_id) const;
  unsigned default_max_downloads() const { return default_max_; }

 private:
  std::string fresh_token_locked() const;

  Datastore& store_;
  unsigned default_max_;
  std::chrono::milliseconds ttl_;
  LivenessProbe probe_;
  std::function<Instant()> clock_;
  mutable std::mutex mutex_;
  std::map<std::string, OneTimeLink> links_;
  std::multimap<std::string, std::string> by_instance_;
  std::set<std::string> closed_instances_;
};

}  // namespace wpsenv::store
