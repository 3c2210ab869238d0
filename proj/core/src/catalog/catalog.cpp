#include "wpsenv/catalog/catalog.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>

#include "wpsenv/url.hpp"
#include "wpsenv/wps/client.hpp"

namespace wpsenv::catalog {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

RegistrationDraft begin_registration(std::string display_name, std::string description, std::string endpoint) {
  auto url = Url::parse(endpoint);
  if (!url) throw ValidationError("endpoint is not an absolute http URL: " + endpoint);
  if (display_name.empty()) throw ValidationError("display name is empty");
  RegistrationDraft d;
  d.display_name = std::move(display_name);
  d.description = std::move(description);
  d.endpoint = std::move(endpoint);
  return d;
}

std::vector<wps::ProcessBrief> list_remote_processes(RegistrationDraft& draft) {
  wps::Client client(draft.endpoint);
  draft.listed = client.get_capabilities().process_briefs;
  draft.selected.reset();
  return draft.listed;
}

void select_remote_process(RegistrationDraft& draft, const std::string& identifier) {
  bool listed = std::any_of(draft.listed.begin(), draft.listed.end(),
                            [&](const wps::ProcessBrief& b) { return b.identifier == identifier; });
  if (!listed) throw ValidationError("process " + identifier + " was not offered by " + draft.endpoint);
  wps::Client client(draft.endpoint);
  auto desc = client.describe_process(identifier);
  if (desc.identifier != identifier)
    throw ProtocolError("DescribeProcess answered " + desc.identifier + " for " + identifier);
  draft.selected = std::move(desc);
}

Catalog::Catalog(fs::path file) : file_(std::move(file)) {
  if (!file_.empty() && fs::exists(file_)) load();
}

ProcessDescriptor Catalog::finalize_registration(const RegistrationDraft& draft,
                                                 const std::vector<WidgetBinding>& bindings,
                                                 std::string wrapper_name) {
  if (!draft.selected) throw ValidationError("no process selected");
  const auto& pd = *draft.selected;

  std::set<std::string> bound;
  for (const auto& b : bindings) {
    if (!pd.find_input(b.param_id) && !pd.find_output(b.param_id))
      throw ValidationError("binding for unknown parameter " + b.param_id);
    if (!bound.insert(b.param_id).second) throw ValidationError("parameter " + b.param_id + " bound twice");
  }
  auto bind = [&](const wps::ParamDecl& decl, bool output) {
    BoundParam p;
    p.decl = decl;
    p.human_name = decl.title.empty() ? decl.identifier : decl.title;
    auto it = std::find_if(bindings.begin(), bindings.end(),
                           [&](const WidgetBinding& b) { return b.param_id == decl.identifier; });
    if (it == bindings.end()) {
      if (!output) throw ValidationError("input " + decl.identifier + " has no widget binding");
      p.widget.kind = default_widget(decl.dtype, true);
    } else {
      p.widget = it->widget;
      if (!it->human_name.empty()) p.human_name = it->human_name;
      p.human_description = it->human_description;
    }
    return p;
  };

  ProcessDescriptor d;
  d.display_name = draft.display_name;
  d.description = draft.description;
  d.endpoint = draft.endpoint;
  d.remote_identifier = pd.identifier;
  d.kind = ProcessKind::Remote;
  d.store_supported = pd.store_supported;
  d.status_supported = pd.status_supported;
  for (const auto& in : pd.inputs) d.inputs.push_back(bind(in, false));
  for (const auto& out : pd.outputs) d.outputs.push_back(bind(out, true));

  std::unique_lock lock(mutex_);
  d.wrapper_name = wrapper_name.empty() ? default_wrapper_locked(pd.identifier) : std::move(wrapper_name);
  d.local_id = next_id_locked();
  validate_locked(d);
  insert_locked(d);
  return d;
}

ProcessDescriptor Catalog::add(ProcessDescriptor desc) {
  std::unique_lock lock(mutex_);
  if (desc.local_id.empty()) desc.local_id = next_id_locked();
  validate_locked(desc);
  insert_locked(desc);
  return desc;
}

bool Catalog::remove(const std::string& local_id) {
  std::unique_lock lock(mutex_);
  auto it = std::find_if(processes_.begin(), processes_.end(),
                         [&](const ProcessDescriptor& d) { return d.local_id == local_id; });
  if (it == processes_.end()) return false;
  auto saved = *it;
  auto pos = processes_.erase(it);
  try {
    save_locked();
  } catch (...) {
    processes_.insert(pos, std::move(saved));
    throw;
  }
  return true;
}

void Catalog::validate_locked(const ProcessDescriptor& d) const {
  if (!valid_wrapper_name(d.wrapper_name))
    throw ValidationError("wrapper_name must match [A-Za-z_][A-Za-z0-9_]*: '" + d.wrapper_name + "'");
  for (const auto& p : processes_) {
    if (p.wrapper_name == d.wrapper_name) throw DuplicateWrapper(d.wrapper_name);
    if (p.local_id == d.local_id) throw ValidationError("duplicate local_id " + d.local_id);
  }
  if (d.kind == ProcessKind::Remote && !Url::parse(d.endpoint))
    throw ValidationError("endpoint is not an absolute http URL: " + d.endpoint);
  auto check_params = [](const std::vector<BoundParam>& params) {
    std::set<std::string> ids;
    for (const auto& p : params) {
      if (!ids.insert(p.decl.identifier).second) throw ValidationError("duplicate parameter " + p.decl.identifier);
      wps::check(p.decl.dtype);
      check(p.widget);
      if (!widget_compatible(p.widget.kind, p.decl.dtype))
        throw ValidationError(std::string(to_string(p.widget.kind)) + " widget cannot bind " +
                                  wps::describe(p.decl.dtype) + " parameter " + p.decl.identifier,
                              std::string(to_string(p.widget.kind)));
    }
  };
  check_params(d.inputs);
  check_params(d.outputs);
}

void Catalog::insert_locked(ProcessDescriptor d) {
  processes_.push_back(std::move(d));
  try {
    save_locked();
  } catch (...) {
    processes_.pop_back();
    throw;
  }
}

void Catalog::save_locked() const {
  if (file_.empty()) return;
  nlohmann::json doc{{"version", 1}, {"processes", processes_}};
  fs::create_directories(file_.parent_path());
  fs::path tmp = file_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) throw IllegalState("cannot write " + tmp.string());
  }
  fs::rename(tmp, file_);
}

void Catalog::load() {
  std::unique_lock lock(mutex_);
  std::ifstream in(file_);
  if (!in) throw NotFound("cannot open catalog " + file_.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("catalog is not valid JSON: ") + e.what());
  }
  if (doc.value("version", 0) != 1) throw ValidationError("unsupported catalog version");
  processes_ = doc.at("processes").get<std::vector<ProcessDescriptor>>();
  spdlog::debug("loaded {} processes from {}", processes_.size(), file_.string());
}

std::string Catalog::next_id_locked() const {
  unsigned max = 0;
  for (const auto& p : processes_) {
    if (p.local_id.size() > 1 && p.local_id[0] == 'p') {
      try {
        max = std::max(max, static_cast<unsigned>(std::stoul(p.local_id.substr(1))));
      } catch (...) {
      }
    }
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%04u", max + 1);
  return buf;
}

std::string Catalog::default_wrapper_locked(std::string_view remote_identifier) const {
  std::string base = lower(remote_identifier);
  for (auto& c : base)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) c = '_';
  if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0]))) base.insert(0, "_");
  auto taken = [&](const std::string& name) {
    return std::any_of(processes_.begin(), processes_.end(),
                       [&](const ProcessDescriptor& p) { return p.wrapper_name == name; });
  };
  if (!taken(base)) return base;
  for (unsigned n = 2;; ++n) {
    std::string candidate = base + "_" + std::to_string(n);
    if (!taken(candidate)) return candidate;
  }
}

std::string Catalog::default_wrapper_name(std::string_view remote_identifier) const {
  std::shared_lock lock(mutex_);
  return default_wrapper_locked(remote_identifier);
}

std::vector<ProcessDescriptor> Catalog::search(std::string_view query) const {
  std::string q = lower(query);
  std::vector<ProcessDescriptor> out;
  {
    std::shared_lock lock(mutex_);
    for (const auto& p : processes_)
      if (q.empty() || lower(p.display_name).find(q) != std::string::npos ||
          lower(p.description).find(q) != std::string::npos)
        out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ProcessDescriptor& a, const ProcessDescriptor& b) { return a.display_name < b.display_name; });
  return out;
}

std::vector<ProcessDescriptor> Catalog::all() const {
  std::shared_lock lock(mutex_);
  return processes_;
}

std::optional<ProcessDescriptor> Catalog::get(const std::string& local_id) const {
  std::shared_lock lock(mutex_);
  for (const auto& p : processes_)
    if (p.local_id == local_id) return p;
  return std::nullopt;
}

std::optional<ProcessDescriptor> Catalog::find_by_wrapper(std::string_view wrapper) const {
  std::shared_lock lock(mutex_);
  for (const auto& p : processes_)
    if (p.wrapper_name == wrapper) return p;
  return std::nullopt;
}

std::optional<ProcessDescriptor> Catalog::find_by_remote(std::string_view endpoint, std::string_view identifier) const {
  std::shared_lock lock(mutex_);
  for (const auto& p : processes_) {
    if (endpoint == kLocalEndpoint) {
      if (p.is_local() && (p.remote_identifier == identifier || p.wrapper_name == identifier)) return p;
    } else if (p.endpoint == endpoint && p.remote_identifier == identifier) {
      return p;
    }
  }
  return std::nullopt;
}

std::optional<ProcessDescriptor> Catalog::resolve(const std::string& id_or_wrapper) const {
  if (auto p = get(id_or_wrapper)) return p;
  return find_by_wrapper(id_or_wrapper);
}

}  // namespace wpsenv::catalog
