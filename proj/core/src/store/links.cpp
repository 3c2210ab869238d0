#include "wpsenv/store/links.hpp"

#include <array>
#include <random>

#include "wpsenv/error.hpp"

namespace wpsenv::store {

std::string_view to_string(LinkState s) {
  switch (s) {
    case LinkState::Active: return "active";
    case LinkState::Exhausted: return "exhausted";
    case LinkState::Terminated: return "terminated";
  }
  return "unknown";
}

LinkRegistry::LinkRegistry(Datastore& store, unsigned default_max_downloads, std::chrono::milliseconds ttl)
    : store_(store), default_max_(default_max_downloads), ttl_(ttl), clock_(now_utc) {}

void LinkRegistry::set_liveness_probe(LivenessProbe probe) {
  std::lock_guard lock(mutex_);
  probe_ = std::move(probe);
}

void LinkRegistry::set_clock(std::function<Instant()> clock) {
  std::lock_guard lock(mutex_);
  clock_ = std::move(clock);
}

std::string LinkRegistry::fresh_token_locked() const {
  static const char* hex = "0123456789abcdef";
  std::random_device rd;
  for (;;) {
    std::string token;
    token.reserve(32);
    for (int i = 0; i < 4; ++i) {
      std::uint32_t word = rd();
      for (int n = 0; n < 8; ++n) {
        token += hex[word & 15];
        word >>= 4;
      }
    }
    if (!links_.count(token)) return token;
  }
}

OneTimeLink LinkRegistry::mint(const std::string& instance_id, const std::string& user, std::string_view path,
                               std::optional<unsigned> max_downloads) {
  unsigned max = max_downloads.value_or(default_max_);
  if (max == 0) throw ValidationError("max_downloads must be positive");
  std::string rel = Datastore::normalize(path);
  if (!store_.exists(user, rel)) throw NotFound("no such file: " + rel);

  LivenessProbe probe;
  {
    std::lock_guard lock(mutex_);
    probe = probe_;
  }
  // the probe may take the executor's lock, so it runs outside ours
  if (probe && !probe(instance_id)) throw IllegalState("instance " + instance_id + " is terminal or unknown");

  std::lock_guard lock(mutex_);
  if (closed_instances_.count(instance_id)) throw IllegalState("instance " + instance_id + " is terminal");
  OneTimeLink link;
  link.token = fresh_token_locked();
  link.instance_id = instance_id;
  link.user = user;
  link.file = rel;
  link.remaining_downloads = max;
  link.created_at = clock_();
  link.state = LinkState::Active;
  links_.emplace(link.token, link);
  by_instance_.emplace(instance_id, link.token);
  return link;
}

ServeResult LinkRegistry::serve(const std::string& token) {
  std::string user, file;
  {
    std::lock_guard lock(mutex_);
    auto it = links_.find(token);
    if (it == links_.end()) return {ServeOutcome::NotFound, {}};
    OneTimeLink& link = it->second;
    if (link.state != LinkState::Active || clock_() - link.created_at >= ttl_) return {ServeOutcome::Gone, {}};
    if (--link.remaining_downloads == 0) link.state = LinkState::Exhausted;
    user = link.user;
    file = link.file;
  }
  try {
    return {ServeOutcome::Ok, store_.read_file(user, file)};
  } catch (const NotFound&) {
    return {ServeOutcome::NotFound, {}};
  }
}

std::size_t LinkRegistry::terminate_instance(const std::string& instance_id) {
  std::lock_guard lock(mutex_);
  closed_instances_.insert(instance_id);
  std::size_t count = 0;
  auto [b, e] = by_instance_.equal_range(instance_id);
  for (auto it = b; it != e; ++it) {
    auto& link = links_.at(it->second);
    if (link.state == LinkState::Active) {
      link.state = LinkState::Terminated;
      ++count;
    }
  }
  return count;
}

std::optional<OneTimeLink> LinkRegistry::get(const std::string& token) const {
  std::lock_guard lock(mutex_);
  auto it = links_.find(token);
  if (it == links_.end()) return std::nullopt;
  return it->second;
}

std::vector<OneTimeLink> LinkRegistry::links_of(const std::string& instance_id) const {
  std::lock_guard lock(mutex_);
  std::vector<OneTimeLink> out;
  auto [b, e] = by_instance_.equal_range(instance_id);
  for (auto it = b; it != e; ++it) out.push_back(links_.at(it->second));
  return out;
}

}  // namespace wpsenv::store
