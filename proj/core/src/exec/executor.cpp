#include "wpsenv/exec/executor.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <random>

#include "wpsenv/error.hpp"
#include "wpsenv/numfmt.hpp"
#include "wpsenv/wps/client.hpp"

namespace wpsenv::exec {

namespace fs = std::filesystem;
using catalog::ProcessKind;

struct Executor::Job {
  ExecutionInstance inst;  // guarded by Executor::mutex_
  catalog::ProcessDescriptor desc;
  std::vector<OutputTarget> targets;
  std::vector<RunnerOutput> pending;  // outputs reported by the service, not yet placed
  std::atomic<bool> cancelled{false};
  std::atomic<bool> done{false};
};

namespace {

std::string new_instance_id() {
  static const char* hex = "0123456789abcdef";
  std::random_device rd;
  std::string id = "i";
  for (int i = 0; i < 3; ++i) {
    std::uint32_t w = rd();
    for (int n = 0; n < 4; ++n) {
      id += hex[w & 15];
      w >>= 4;
    }
  }
  return id;
}

std::string literal_text(const catalog::ValidatedValue& v) {
  if (const auto* t = std::get_if<catalog::Text>(&v)) return t->value;
  if (const auto* n = std::get_if<catalog::Number>(&v)) return format_number(n->value);
  if (const auto* f = std::get_if<catalog::Flag>(&v)) return f->value ? "true" : "false";
  throw ValidationError("value is not a literal");
}

std::string bbox_text(const wps::BBoxVal& b) {
  return format_number(b.minx) + "," + format_number(b.miny) + "," + format_number(b.maxx) + "," +
         format_number(b.maxy);
}

}  // namespace

Executor::Executor(ExecutorConfig config, store::Datastore& store, store::LinkRegistry& links)
    : config_(std::move(config)), store_(store), links_(links) {
  links_.set_liveness_probe([this](const std::string& id) { return is_live(id); });
  if (!config_.journal.empty()) replay_journal();
}

Executor::~Executor() {
  std::vector<Worker> workers;
  {
    std::lock_guard lock(mutex_);
    shutting_down_ = true;
    for (auto& [id, job] : jobs_) job->cancelled = true;
    workers.swap(workers_);
  }
  changed_.notify_all();
  std::vector<std::shared_ptr<Job>> live;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, job] : jobs_)
      if (!job->inst.terminal()) live.push_back(job);
  }
  for (auto& j : live)
    if (transition(*j, wps::Failed{"shutdown"})) links_.terminate_instance(j->inst.id);
  for (auto& w : workers)
    if (w.thread.joinable()) w.thread.join();
  links_.set_liveness_probe(nullptr);
}

void Executor::set_runner(ProcessKind kind, std::shared_ptr<LocalRunner> runner) {
  std::lock_guard lock(mutex_);
  runners_[kind] = std::move(runner);
}

std::shared_ptr<Executor::Job> Executor::job(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw NotFound("no such instance " + id);
  return it->second;
}

bool Executor::is_live(const std::string& instance_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(instance_id);
  return it != jobs_.end() && !it->second->inst.terminal();
}

std::optional<ExecutionInstance> Executor::get(const std::string& instance_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(instance_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second->inst;
}

ExecutionInstance Executor::wait(const std::string& instance_id) const {
  auto j = job(instance_id);
  std::unique_lock lock(mutex_);
  changed_.wait(lock, [&] { return j->inst.terminal() && j->done.load(); });
  return j->inst;
}

std::vector<ExecutionInstance> Executor::list(const std::optional<std::string>& user) const {
  std::lock_guard lock(mutex_);
  std::vector<ExecutionInstance> out;
  for (const auto& [id, j] : jobs_)
    if (!user || j->inst.user == *user) out.push_back(j->inst);
  std::sort(out.begin(), out.end(),
            [](const ExecutionInstance& a, const ExecutionInstance& b) { return a.submitted_at < b.submitted_at; });
  return out;
}

// ---------------------------------------------------------------------------
// marshaling

std::vector<wps::NamedValue> Executor::marshal_inputs(const catalog::ProcessDescriptor& desc, const ParamValues& values,
                                                      const std::string& instance_id, const std::string& user) {
  for (const auto& [id, v] : values)
    if (!desc.find_input(id) && !desc.find_output(id))
      throw ValidationError("unknown parameter " + id + " for " + desc.wrapper_name);

  std::vector<wps::NamedValue> out;
  for (const auto& param : desc.inputs) {
    const auto& decl = param.decl;
    auto it = std::find_if(values.begin(), values.end(), [&](const auto& kv) { return kv.first == decl.identifier; });
    if (it == values.end()) {
      if (decl.min_occurs > 0) throw ValidationError("missing required input " + decl.identifier);
      continue;
    }
    const auto& v = it->second;
    const auto* cx = std::get_if<wps::ComplexType>(&decl.dtype);
    bool literal = std::holds_alternative<wps::LiteralType>(decl.dtype);
    bool bbox = std::holds_alternative<wps::BBoxType>(decl.dtype);

    if (const auto* m = std::get_if<catalog::Marshaled>(&v)) {
      out.emplace_back(decl.identifier, m->value);
    } else if (const auto* f = std::get_if<catalog::FilePath>(&v)) {
      if (!cx) throw ValidationError("input " + decl.identifier + " does not take a file");
      auto link = links_.mint(instance_id, user, f->path);
      out.emplace_back(decl.identifier, wps::ComplexRef{config_.public_base_url + link.url_path(), cx->mime});
    } else if (const auto* e = std::get_if<catalog::Extent>(&v)) {
      if (!bbox) throw ValidationError("input " + decl.identifier + " does not take an extent");
      out.emplace_back(decl.identifier, wps::BBoxVal{e->minx, e->miny, e->maxx, e->maxy, "EPSG:4326"});
    } else if (const auto* t = std::get_if<catalog::TableRef>(&v)) {
      if (desc.kind != ProcessKind::LocalBuiltin)
        throw ValidationError("table parameters can only be passed to local services", "select_table");
      if (!literal) throw ValidationError("input " + decl.identifier + " does not take a table");
      std::string dsn = "dsn://" + user + "/" + t->table + (t->attr ? "#" + *t->attr : "");
      out.emplace_back(decl.identifier, wps::LiteralVal{std::move(dsn)});
    } else if (std::holds_alternative<catalog::SavePath>(v)) {
      throw ValidationError("input " + decl.identifier + " cannot take a save path");
    } else {
      if (!literal) throw ValidationError("input " + decl.identifier + " does not take a literal value");
      out.emplace_back(decl.identifier, wps::LiteralVal{literal_text(v)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// lifecycle

std::string Executor::execute(const catalog::ProcessDescriptor& desc, const ParamValues& values,
                              const std::string& user, Mode mode, std::optional<std::string> parent_id) {
  store::Datastore::check_user(user);
  auto j = std::make_shared<Job>();
  j->desc = desc;
  j->inst.user = user;
  j->inst.target = desc.local_id;
  j->inst.parent_id = parent_id;
  j->inst.mode = mode;
  j->inst.submitted_at = now_utc();
  j->inst.status = {wps::Accepted{}, j->inst.submitted_at};
  j->inst.history.push_back(wps::Accepted{});
  {
    std::lock_guard lock(mutex_);
    if (shutting_down_) throw IllegalState("executor is shutting down");
    unsigned depth = 0;
    for (auto p = parent_id; p; ++depth) {
      if (depth >= config_.max_nesting) throw ValidationError("nesting deeper than " + std::to_string(depth));
      auto it = jobs_.find(*p);
      p = it == jobs_.end() ? std::nullopt : it->second->inst.parent_id;
    }
    do j->inst.id = new_instance_id();
    while (jobs_.count(j->inst.id));
    jobs_[j->inst.id] = j;
  }
  const std::string id = j->inst.id;
  append_log(*j, "info", "submitted " + desc.wrapper_name + " (" + std::string(catalog::to_string(desc.kind)) + ")");
  persist(*get(id));

  try {
    auto inputs = marshal_inputs(desc, values, id, user);
    for (const auto& out : desc.outputs) {
      OutputTarget t{out.decl.identifier, std::nullopt};
      auto it = std::find_if(values.begin(), values.end(), [&](const auto& kv) { return kv.first == t.param_id; });
      if (it != values.end()) {
        const auto* save = std::get_if<catalog::SavePath>(&it->second);
        if (!save) throw ValidationError("output " + t.param_id + " takes a destination path");
        t.dest = save->path;
      } else if (std::holds_alternative<wps::ComplexType>(out.decl.dtype)) {
        t.dest = "results/" + id + "/" + t.param_id;
      }
      j->targets.push_back(std::move(t));
    }
    std::lock_guard lock(mutex_);
    j->inst.marshaled_inputs = std::move(inputs);
  } catch (const Error& e) {
    transition(*j, wps::Failed{e.what()});
    j->done = true;
    finish(*j);
    throw;
  }

  if (mode == Mode::Sync) {
    run_job(j);
  } else {
    std::vector<Worker> ended;
    {
      std::lock_guard lock(mutex_);
      auto split = std::partition(workers_.begin(), workers_.end(), [](const Worker& w) { return !w.exited->load(); });
      std::move(split, workers_.end(), std::back_inserter(ended));
      workers_.erase(split, workers_.end());
      auto exited = std::make_shared<std::atomic<bool>>(false);
      workers_.push_back({std::thread([this, j, exited] {
                            run_job(j);
                            *exited = true;
                          }),
                          exited});
    }
    for (auto& w : ended) w.thread.join();
  }
  return id;
}

void Executor::run_job(const std::shared_ptr<Job>& j) {
  try {
    if (j->desc.kind == ProcessKind::Remote) {
      run_remote(*j);
    } else {
      std::shared_ptr<LocalRunner> runner;
      {
        std::lock_guard lock(mutex_);
        auto it = runners_.find(j->desc.kind);
        if (it != runners_.end()) runner = it->second;
      }
      if (!runner) throw IllegalState("no runner for " + std::string(catalog::to_string(j->desc.kind)) + " processes");
      run_local(*j, *runner);
    }
  } catch (const std::exception& e) {
    transition(*j, wps::Failed{e.what()});
  }
  j->done = true;
  finish(*j);
}

void Executor::run_remote(Job& j) {
  wps::ExecuteRequest req;
  req.process_id = j.desc.remote_identifier;
  {
    std::lock_guard lock(mutex_);
    req.inputs = j.inst.marshaled_inputs;
  }
  bool async = j.desc.store_supported && j.desc.status_supported;
  req.response_form.store_results = async;
  req.response_form.status = async;
  for (const auto& out : j.desc.outputs) req.response_form.requested_outputs.push_back(out.decl.identifier);

  wps::Client client(j.desc.endpoint);
  auto resp = client.execute(req);
  const auto& state = resp.status.state;
  if (const auto* f = std::get_if<wps::Failed>(&state)) {
    transition(j, *f);
    return;
  }
  if (!std::holds_alternative<wps::Succeeded>(state)) {
    transition(j, state);
    if (!resp.status_location) throw ProtocolError("asynchronous answer without statusLocation");
    {
      std::lock_guard lock(mutex_);
      j.inst.status_location = resp.status_location;
    }
    auto final_status = poll_until_terminal(j.inst.id);
    if (!std::holds_alternative<wps::Succeeded>(final_status.state)) return;
  } else {
    for (auto& [id, v] : resp.outputs) j.pending.push_back({id, std::move(v)});
  }
  if (j.cancelled) return;
  collect_results(j.inst.id, j.targets);
  transition(j, wps::Succeeded{});
}

wps::ExecuteStatus Executor::poll_until_terminal(const std::string& instance_id) {
  auto jp = job(instance_id);
  Job& j = *jp;
  std::string location;
  Instant submitted;
  {
    std::lock_guard lock(mutex_);
    if (!j.inst.status_location) throw PreconditionError("instance " + instance_id + " has no statusLocation");
    location = *j.inst.status_location;
    submitted = j.inst.submitted_at;
  }
  auto interval = config_.poll_interval;
  std::string last_seen;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      changed_.wait_for(lock, interval, [&] { return j.cancelled.load() || shutting_down_; });
      if (j.cancelled || shutting_down_ || j.inst.terminal()) return j.inst.status;
    }
    if (now_utc() - submitted > config_.job_timeout) {
      transition(j, wps::Failed{"timeout"});
      throw TimeoutError("instance " + instance_id + " timed out");
    }
    auto resp = wps::fetch_status(location);
    std::string seen = describe(resp.status.state);
    bool progressed = seen != last_seen;
    last_seen = seen;

    if (std::holds_alternative<wps::Succeeded>(resp.status.state)) {
      j.pending.clear();
      for (auto& [id, v] : resp.outputs) j.pending.push_back({id, std::move(v)});
      return resp.status;
    }
    if (std::holds_alternative<wps::Failed>(resp.status.state)) {
      transition(j, resp.status.state);
      return resp.status;
    }
    transition(j, resp.status.state);
    // back off only while the remote reports no change
    if (progressed) {
      interval = config_.poll_interval;
    } else {
      auto next = std::chrono::milliseconds(static_cast<long long>(interval.count() * config_.poll_backoff));
      interval = std::min(next, config_.poll_cap);
    }
  }
}

std::string Executor::fetch_input(const wps::InputValue& v) {
  if (const auto* lit = std::get_if<wps::LiteralVal>(&v)) return lit->text;
  if (const auto* in = std::get_if<wps::ComplexInline>(&v)) return in->body;
  if (const auto* bb = std::get_if<wps::BBoxVal>(&v)) return bbox_text(*bb);
  const auto& ref = std::get<wps::ComplexRef>(v);
  const std::string prefix = config_.public_base_url + "/files/";
  if (ref.href.rfind(prefix, 0) == 0) {
    auto res = links_.serve(ref.href.substr(prefix.size()));
    if (res.outcome == store::ServeOutcome::Gone) throw Gone("download link is no longer valid: " + ref.href);
    if (res.outcome == store::ServeOutcome::NotFound) throw NotFound("unknown download link: " + ref.href);
    return std::move(res.bytes);
  }
  return wps::fetch_bytes(ref.href);
}

void Executor::run_local(Job& j, LocalRunner& runner) {
  RunContext ctx;
  ctx.instance_id = j.inst.id;
  ctx.user = j.inst.user;
  for (const auto& t : j.targets)
    if (t.dest) ctx.output_dests[t.param_id] = *t.dest;
  ctx.fetch = [this](const wps::InputValue& v) { return fetch_input(v); };
  ctx.progress = [this, &j](int p) { transition(j, wps::Started{std::clamp(p, 0, 99)}); };
  ctx.log = [this, &j](std::string_view level, std::string text) { append_log(j, level, std::move(text)); };
  ctx.cancelled = &j.cancelled;

  std::vector<wps::NamedValue> inputs;
  {
    std::lock_guard lock(mutex_);
    inputs = j.inst.marshaled_inputs;
  }
  j.pending = runner.run(j.desc, inputs, ctx);
  if (j.cancelled) return;
  collect_results(j.inst.id, j.targets);
  transition(j, wps::Succeeded{});
}

std::vector<ResultRecord> Executor::collect_results(const std::string& instance_id,
                                                    const std::vector<OutputTarget>& targets) {
  auto jp = job(instance_id);
  Job& j = *jp;
  std::vector<ResultRecord> records;
  try {
    for (const auto& out : j.pending) {
      auto t = std::find_if(targets.begin(), targets.end(),
                            [&](const OutputTarget& ot) { return ot.param_id == out.param_id; });
      std::optional<std::string> dest = t != targets.end() ? t->dest : std::nullopt;
      ResultRecord rec{out.param_id, LiteralResult{}};
      if (const auto* sf = std::get_if<StoredFile>(&out.value)) {
        if (!store_.exists(j.inst.user, sf->path)) throw NotFound("output file " + sf->path + " was not written");
        rec.value = *sf;
      } else {
        const auto& v = std::get<wps::InputValue>(out.value);
        if (const auto* lit = std::get_if<wps::LiteralVal>(&v)) {
          rec.value = LiteralResult{lit->text};
        } else if (const auto* bb = std::get_if<wps::BBoxVal>(&v)) {
          rec.value = LiteralResult{bbox_text(*bb)};
        } else if (!dest) {
          rec.value = LiteralResult{fetch_input(v)};
        } else {
          if (store_.exists(j.inst.user, *dest)) append_log(j, "warn", "overwriting " + *dest);
          if (const auto* ref = std::get_if<wps::ComplexRef>(&v))
            rec.value = StoredFile{store_.fetch_remote_result(ref->href, j.inst.user, *dest).path};
          else
            rec.value = StoredFile{store_.put_file(j.inst.user, *dest, std::get<wps::ComplexInline>(v).body).path};
        }
      }
      if (auto* sf = std::get_if<StoredFile>(&rec.value))
        append_log(j, "info", "stored output " + rec.param_id + " at " + sf->path);
      records.push_back(std::move(rec));
    }
  } catch (const Error& e) {
    throw Error(e.code(), std::string("result fetch: ") + e.what());
  }
  {
    std::lock_guard lock(mutex_);
    j.inst.results = records;
  }
  links_.terminate_instance(instance_id);
  return records;
}

bool Executor::cancel(const std::string& instance_id) {
  auto j = job(instance_id);
  j->cancelled = true;
  bool changed = transition(*j, wps::Failed{"cancelled"});
  changed_.notify_all();
  if (changed) finish(*j);
  // children of a scenario go down with it
  std::vector<std::string> children;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, child] : jobs_)
      if (child->inst.parent_id == instance_id && !child->inst.terminal()) children.push_back(id);
  }
  for (const auto& c : children) cancel(c);
  return changed;
}

bool Executor::transition(Job& j, const wps::StatusState& next) {
  std::optional<ExecutionInstance> snapshot;
  {
    std::lock_guard lock(mutex_);
    if (!apply_transition(j.inst, next, now_utc())) return false;
    j.inst.log.push_back({now_utc(), std::holds_alternative<wps::Failed>(next) ? "error" : "info",
                          "status: " + describe(next)});
    snapshot = j.inst;
  }
  changed_.notify_all();
  persist(*snapshot);
  return true;
}

void Executor::append_log(Job& j, std::string_view level, std::string text) {
  std::lock_guard lock(mutex_);
  j.inst.log.push_back({now_utc(), std::string(level), std::move(text)});
}

void Executor::finish(Job& j) {
  links_.terminate_instance(j.inst.id);
  std::optional<ExecutionInstance> snapshot;
  {
    std::lock_guard lock(mutex_);
    if (j.inst.terminal()) snapshot = j.inst;
  }
  changed_.notify_all();
  if (snapshot) persist(*snapshot);
}

// ---------------------------------------------------------------------------
// journal

void Executor::persist(const ExecutionInstance& snapshot) {
  if (config_.journal.empty()) return;
  std::lock_guard lock(journal_mutex_);
  std::ofstream out(config_.journal, std::ios::app);
  out << nlohmann::json(snapshot).dump() << '\n';
}

void Executor::replay_journal() {
  std::error_code ec;
  fs::create_directories(config_.journal.parent_path(), ec);
  std::ifstream in(config_.journal);
  if (!in) return;
  std::map<std::string, ExecutionInstance> latest;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto inst = nlohmann::json::parse(line).get<ExecutionInstance>();
      latest[inst.id] = std::move(inst);
    } catch (const std::exception& e) {
      spdlog::warn("skipping unreadable journal line: {}", e.what());
    }
  }
  in.close();
  for (auto& [id, inst] : latest) {
    auto j = std::make_shared<Job>();
    j->inst = std::move(inst);
    j->done = true;
    if (!j->inst.terminal()) {
      apply_transition(j->inst, wps::Failed{"orphaned"}, now_utc());
      j->inst.log.push_back({now_utc(), "error", "status: failed: orphaned"});
      persist(j->inst);
    }
    jobs_[id] = std::move(j);
  }
}

}  // namespace wpsenv::exec
