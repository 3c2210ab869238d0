#include "wpsenv/exec/instance.hpp"

#include "wpsenv/error.hpp"

namespace wpsenv::exec {

int ExecutionInstance::percent() const {
  if (const auto* s = std::get_if<wps::Started>(&status.state)) return s->percent;
  return std::holds_alternative<wps::Succeeded>(status.state) ? 100 : 0;
}

bool apply_transition(ExecutionInstance& inst, const wps::StatusState& next, Instant at) {
  const auto& cur = inst.status.state;
  if (inst.status.terminal()) return false;
  if (std::holds_alternative<wps::Accepted>(next)) return false;
  if (const auto* n = std::get_if<wps::Started>(&next)) {
    if (n->percent < 0 || n->percent > 99) return false;
    if (const auto* c = std::get_if<wps::Started>(&cur); c && n->percent <= c->percent) return false;
  }
  inst.status.state = next;
  inst.status.timestamp = at;
  inst.history.push_back(next);
  if (inst.status.terminal()) inst.finished_at = at;
  return true;
}

std::string describe(const wps::StatusState& s) {
  if (const auto* st = std::get_if<wps::Started>(&s)) return "started " + std::to_string(st->percent) + "%";
  if (const auto* f = std::get_if<wps::Failed>(&s)) return "failed: " + f->message;
  return wps::state_name(s);
}

namespace {

nlohmann::json state_json(const wps::StatusState& s) {
  nlohmann::json j{{"state", wps::state_name(s)}};
  if (const auto* st = std::get_if<wps::Started>(&s)) j["percent"] = st->percent;
  if (const auto* f = std::get_if<wps::Failed>(&s)) j["message"] = f->message;
  return j;
}

wps::StatusState state_from_json(const nlohmann::json& j) {
  auto name = j.at("state").get<std::string>();
  if (name == "accepted") return wps::Accepted{};
  if (name == "started") return wps::Started{j.value("percent", 0)};
  if (name == "succeeded") return wps::Succeeded{};
  if (name == "failed") return wps::Failed{j.value("message", std::string{})};
  throw ValidationError("unknown status " + name);
}

Instant instant_from(const nlohmann::json& j) {
  auto t = parse_instant(j.get<std::string>());
  if (!t) throw ValidationError("bad timestamp " + j.get<std::string>());
  return *t;
}

}  // namespace

void to_json(nlohmann::json& j, const ResultRecord& r) {
  j = {{"param_id", r.param_id}};
  if (const auto* lit = std::get_if<LiteralResult>(&r.value)) {
    j["kind"] = "literal";
    j["text"] = lit->text;
  } else {
    j["kind"] = "stored_file";
    j["path"] = std::get<StoredFile>(r.value).path;
  }
}

void to_json(nlohmann::json& j, const ExecutionInstance& inst) {
  j = nlohmann::json{{"id", inst.id},
                     {"user", inst.user},
                     {"target", inst.target},
                     {"mode", inst.mode == Mode::Sync ? "sync" : "async"},
                     {"status", state_json(inst.status.state)},
                     {"status_time", format_instant(inst.status.timestamp)},
                     {"submitted_at", format_instant(inst.submitted_at)}};
  j["status"]["percent"] = inst.percent();
  j["parent_id"] = inst.parent_id ? nlohmann::json(*inst.parent_id) : nlohmann::json();
  j["finished_at"] = inst.finished_at ? nlohmann::json(format_instant(*inst.finished_at)) : nlohmann::json();
  if (inst.status_location) j["status_location"] = *inst.status_location;
  auto& hist = j["history"] = nlohmann::json::array();
  for (const auto& s : inst.history) hist.push_back(state_json(s));
  auto& inputs = j["marshaled_inputs"] = nlohmann::json::array();
  for (const auto& [id, v] : inst.marshaled_inputs) inputs.push_back({{"param_id", id}, {"value", v}});
  j["results"] = inst.results;
  auto& log = j["log"] = nlohmann::json::array();
  for (const auto& e : inst.log) log.push_back({{"at", format_instant(e.at)}, {"level", e.level}, {"text", e.text}});
}

void from_json(const nlohmann::json& j, ExecutionInstance& inst) {
  inst = ExecutionInstance{};
  inst.id = j.at("id").get<std::string>();
  inst.user = j.at("user").get<std::string>();
  inst.target = j.at("target").get<std::string>();
  inst.mode = j.value("mode", std::string{"sync"}) == "async" ? Mode::Async : Mode::Sync;
  inst.status.state = state_from_json(j.at("status"));
  inst.status.timestamp = instant_from(j.at("status_time"));
  inst.submitted_at = instant_from(j.at("submitted_at"));
  if (j.contains("parent_id") && !j["parent_id"].is_null()) inst.parent_id = j["parent_id"].get<std::string>();
  if (j.contains("finished_at") && !j["finished_at"].is_null()) inst.finished_at = instant_from(j["finished_at"]);
  if (j.contains("status_location")) inst.status_location = j["status_location"].get<std::string>();
  for (const auto& h : j.value("history", nlohmann::json::array())) inst.history.push_back(state_from_json(h));
  for (const auto& in : j.value("marshaled_inputs", nlohmann::json::array()))
    inst.marshaled_inputs.emplace_back(in.at("param_id").get<std::string>(), in.at("value").get<wps::InputValue>());
  for (const auto& r : j.value("results", nlohmann::json::array())) {
    ResultRecord rec;
    rec.param_id = r.at("param_id").get<std::string>();
    if (r.at("kind") == "literal")
      rec.value = LiteralResult{r.at("text").get<std::string>()};
    else
      rec.value = StoredFile{r.at("path").get<std::string>()};
    inst.results.push_back(std::move(rec));
  }
  for (const auto& e : j.value("log", nlohmann::json::array()))
    inst.log.push_back({instant_from(e.at("at")), e.at("level").get<std::string>(), e.at("text").get<std::string>()});
}

}  // namespace wpsenv::exec

namespace wpsenv::wps {

void to_json(nlohmann::json& j, const InputValue& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LiteralVal>)
          j = {{"kind", "literal"}, {"text", x.text}};
        else if constexpr (std::is_same_v<T, ComplexRef>)
          j = {{"kind", "reference"}, {"href", x.href}, {"mime", x.mime}};
        else if constexpr (std::is_same_v<T, ComplexInline>)
          j = {{"kind", "inline"}, {"body", x.body}, {"mime", x.mime}};
        else
          j = {{"kind", "bbox"}, {"minx", x.minx}, {"miny", x.miny}, {"maxx", x.maxx}, {"maxy", x.maxy}, {"crs", x.crs}};
      },
      v);
}

void from_json(const nlohmann::json& j, InputValue& v) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "literal")
    v = LiteralVal{j.at("text").get<std::string>()};
  else if (kind == "reference")
    v = ComplexRef{j.at("href").get<std::string>(), j.value("mime", std::string{})};
  else if (kind == "inline")
    v = ComplexInline{j.at("body").get<std::string>(), j.value("mime", std::string{})};
  else if (kind == "bbox")
    v = BBoxVal{j.at("minx").get<double>(), j.at("miny").get<double>(), j.at("maxx").get<double>(),
                j.at("maxy").get<double>(), j.value("crs", std::string{})};
  else
    throw wpsenv::ValidationError("unknown value kind " + kind);
}

}  // namespace wpsenv::wps
