#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "wpsenv/catalog/descriptor.hpp"
#include "wpsenv/error.hpp"
#include "wpsenv/wps/types.hpp"

namespace wpsenv::catalog {

/// State carried between the four registration steps.
struct RegistrationDraft {
  std::string display_name;
  std::string description;
  std::string endpoint;
  std::vector<wps::ProcessBrief> listed;             // step 2
  std::optional<wps::ProcessDescription> selected;  // step 3
};

struct WidgetBinding {
  std::string param_id;
  WidgetDescriptor widget;
  std::string human_name;
  std::string human_description;
};

class DuplicateWrapper : public ValidationError {
 public:
  explicit DuplicateWrapper(const std::string& name) : ValidationError("duplicate wrapper_name " + name) {}
};

/// Step 1: pure field capture, no network I/O.
RegistrationDraft begin_registration(std::string display_name, std::string description, std::string endpoint);
/// Step 2: GetCapabilities against the draft's endpoint.
std::vector<wps::ProcessBrief> list_remote_processes(RegistrationDraft& draft);
/// Step 3: DescribeProcess for one listed identifier.
void select_remote_process(RegistrationDraft& draft, const std::string& identifier);

/// Registry of services and scenarios persisted to one JSON document.
/// Writers serialize; readers get copies of a consistent snapshot.
class Catalog {
 public:
  /// An empty path keeps the catalog in memory only.
  explicit Catalog(std::filesystem::path file = {});

  /// Step 4. Atomic: on any error nothing is registered.
  ProcessDescriptor finalize_registration(const RegistrationDraft& draft, const std::vector<WidgetBinding>& bindings,
                                          std::string wrapper_name);

  /// Inserts a fully built descriptor (local builtins, published scenarios).
  /// Assigns local_id when empty.
  ProcessDescriptor add(ProcessDescriptor desc);
  bool remove(const std::string& local_id);

  std::vector<ProcessDescriptor> search(std::string_view query) const;
  std::vector<ProcessDescriptor> all() const;
  std::optional<ProcessDescriptor> get(const std::string& local_id) const;
  std::optional<ProcessDescriptor> find_by_wrapper(std::string_view wrapper) const;
  /// Local processes match on kLocalEndpoint plus remote identifier or
  /// wrapper name.
  std::optional<ProcessDescriptor> find_by_remote(std::string_view endpoint, std::string_view identifier) const;
  /// local_id first, then wrapper name.
  std::optional<ProcessDescriptor> resolve(const std::string& id_or_wrapper) const;

  /// Lowercased identifier with non-identifier characters mapped to '_',
  /// suffixed "_2", "_3", ... until unused.
  std::string default_wrapper_name(std::string_view remote_identifier) const;

  void load();

 private:
  void validate_locked(const ProcessDescriptor& d) const;
  void insert_locked(ProcessDescriptor d);
  void save_locked() const;
  std::string next_id_locked() const;
  std::string default_wrapper_locked(std::string_view remote_identifier) const;

  std::filesystem::path file_;
  mutable std::shared_mutex mutex_;
  std::vector<ProcessDescriptor> processes_;
};

}  // namespace wpsenv::catalog
