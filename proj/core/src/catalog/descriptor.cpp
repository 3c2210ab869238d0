#include "wpsenv/catalog/descriptor.hpp"

#include <algorithm>
#include <cctype>

#include "wpsenv/error.hpp"

namespace wpsenv::catalog {

namespace {

constexpr std::pair<WidgetKind, std::string_view> kWidgetNames[] = {
    {WidgetKind::Edit, "edit"},
    {WidgetKind::Number, "number"},
    {WidgetKind::Checkbox, "checkbox"},
    {WidgetKind::Rectangle, "rectangle"},
    {WidgetKind::File, "file"},
    {WidgetKind::FileSave, "file_save"},
    {WidgetKind::SelectTable, "select_table"},
    {WidgetKind::SelectTableAttr, "select_table_attr"},
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(WidgetKind k) {
  for (auto [kind, name] : kWidgetNames)
    if (kind == k) return name;
  return "edit";
}

std::optional<WidgetKind> widget_kind_from_string(std::string_view s) {
  for (auto [kind, name] : kWidgetNames)
    if (name == s) return kind;
  return std::nullopt;
}

void check(const WidgetDescriptor& w) {
  if (w.kind != WidgetKind::Number && (w.min || w.max))
    throw ValidationError("constraints are only allowed on number widgets", std::string(to_string(w.kind)));
  if (w.min && w.max && *w.min > *w.max) throw ValidationError("min exceeds max", "number");
}

bool widget_compatible(WidgetKind kind, const wps::DataTypeSpec& dtype) {
  if (const auto* lit = std::get_if<wps::LiteralType>(&dtype)) {
    std::string base = lower(lit->base);
    switch (kind) {
      case WidgetKind::Edit:
      case WidgetKind::SelectTable:
      case WidgetKind::SelectTableAttr: return base == "string";
      case WidgetKind::Number: return base == "double" || base == "integer";
      case WidgetKind::Checkbox: return base == "boolean";
      default: return false;
    }
  }
  if (std::holds_alternative<wps::BBoxType>(dtype)) return kind == WidgetKind::Rectangle;
  return kind == WidgetKind::File || kind == WidgetKind::FileSave;
}

WidgetKind default_widget(const wps::DataTypeSpec& dtype, bool output) {
  if (const auto* lit = std::get_if<wps::LiteralType>(&dtype)) {
    std::string base = lower(lit->base);
    if (base == "double" || base == "integer") return WidgetKind::Number;
    if (base == "boolean") return WidgetKind::Checkbox;
    return WidgetKind::Edit;
  }
  if (std::holds_alternative<wps::BBoxType>(dtype)) return WidgetKind::Rectangle;
  return output ? WidgetKind::FileSave : WidgetKind::File;
}

wps::DataTypeSpec implied_dtype(WidgetKind kind) {
  switch (kind) {
    case WidgetKind::Number: return wps::LiteralType{"double"};
    case WidgetKind::Checkbox: return wps::LiteralType{"boolean"};
    case WidgetKind::Rectangle: return wps::BBoxType{"EPSG:4326"};
    case WidgetKind::File:
    case WidgetKind::FileSave: return wps::ComplexType{"text/plain", std::nullopt, std::nullopt};
    default: return wps::LiteralType{"string"};
  }
}

std::string_view to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::Remote: return "remote";
    case ProcessKind::LocalBuiltin: return "local_builtin";
    case ProcessKind::Scenario: return "scenario";
  }
  return "remote";
}

const BoundParam* ProcessDescriptor::find_input(std::string_view id) const {
  for (const auto& p : inputs)
    if (p.decl.identifier == id) return &p;
  return nullptr;
}

const BoundParam* ProcessDescriptor::find_output(std::string_view id) const {
  for (const auto& p : outputs)
    if (p.decl.identifier == id) return &p;
  return nullptr;
}

wps::ProcessDescription ProcessDescriptor::to_process_description() const {
  wps::ProcessDescription d;
  d.identifier = is_local() ? wrapper_name : remote_identifier;
  d.title = display_name;
  if (!description.empty()) d.abstract = description;
  for (const auto& p : inputs) {
    d.inputs.push_back(p.decl);
    if (!p.human_name.empty()) d.inputs.back().title = p.human_name;
  }
  for (const auto& p : outputs) {
    d.outputs.push_back(p.decl);
    if (!p.human_name.empty()) d.outputs.back().title = p.human_name;
  }
  d.store_supported = store_supported;
  d.status_supported = status_supported;
  return d;
}

bool valid_wrapper_name(std::string_view name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const WidgetDescriptor& w) {
  j = nlohmann::json{{"kind", to_string(w.kind)}};
  if (w.min || w.max) {
    auto& c = j["constraints"] = nlohmann::json::object();
    if (w.min) c["min"] = *w.min;
    if (w.max) c["max"] = *w.max;
  }
  if (w.default_value) j["default"] = *w.default_value;
}

void from_json(const nlohmann::json& j, WidgetDescriptor& w) {
  auto kind = widget_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw ValidationError("unknown widget kind " + j.at("kind").get<std::string>());
  w = WidgetDescriptor{};
  w.kind = *kind;
  if (auto c = j.find("constraints"); c != j.end() && c->is_object()) {
    if (c->contains("min")) w.min = c->at("min").get<double>();
    if (c->contains("max")) w.max = c->at("max").get<double>();
  }
  if (auto d = j.find("default"); d != j.end() && !d->is_null()) w.default_value = d->get<std::string>();
}

void to_json(nlohmann::json& j, const BoundParam& p) {
  j = nlohmann::json{{"decl", p.decl},
                     {"widget", p.widget},
                     {"human_name", p.human_name},
                     {"human_description", p.human_description}};
}

void from_json(const nlohmann::json& j, BoundParam& p) {
  p = BoundParam{};
  p.widget = j.at("widget").get<WidgetDescriptor>();
  const auto& decl = j.at("decl");
  p.decl.identifier = decl.at("identifier").get<std::string>();
  p.decl.title = decl.value("title", p.decl.identifier);
  p.decl.min_occurs = decl.value("min_occurs", 1u);
  p.decl.max_occurs = decl.value("max_occurs", 1u);
  // scenario packages may declare a parameter by widget alone
  p.decl.dtype = decl.contains("dtype") ? decl.at("dtype").get<wps::DataTypeSpec>() : implied_dtype(p.widget.kind);
  p.human_name = j.value("human_name", std::string{});
  p.human_description = j.value("human_description", std::string{});
}

void to_json(nlohmann::json& j, const ProcessDescriptor& d) {
  j = nlohmann::json{{"local_id", d.local_id},
                     {"display_name", d.display_name},
                     {"description", d.description},
                     {"endpoint", d.endpoint},
                     {"remote_identifier", d.remote_identifier},
                     {"inputs", d.inputs},
                     {"outputs", d.outputs},
                     {"wrapper_name", d.wrapper_name},
                     {"kind", to_string(d.kind)},
                     {"store_supported", d.store_supported},
                     {"status_supported", d.status_supported}};
  if (d.scenario)
    j["scenario"] = {{"source", d.scenario->source},
                     {"entry_function", d.scenario->entry_function},
                     {"owner", d.scenario->owner}};
}

void from_json(const nlohmann::json& j, ProcessDescriptor& d) {
  d = ProcessDescriptor{};
  d.local_id = j.at("local_id").get<std::string>();
  d.display_name = j.at("display_name").get<std::string>();
  d.description = j.value("description", std::string{});
  d.endpoint = j.at("endpoint").get<std::string>();
  d.remote_identifier = j.at("remote_identifier").get<std::string>();
  d.inputs = j.at("inputs").get<std::vector<BoundParam>>();
  d.outputs = j.at("outputs").get<std::vector<BoundParam>>();
  d.wrapper_name = j.at("wrapper_name").get<std::string>();
  auto kind = j.at("kind").get<std::string>();
  if (kind == "remote")
    d.kind = ProcessKind::Remote;
  else if (kind == "local_builtin")
    d.kind = ProcessKind::LocalBuiltin;
  else if (kind == "scenario")
    d.kind = ProcessKind::Scenario;
  else
    throw ValidationError("unknown process kind " + kind);
  d.store_supported = j.value("store_supported", false);
  d.status_supported = j.value("status_supported", false);
  if (auto s = j.find("scenario"); s != j.end() && s->is_object())
    d.scenario = ScenarioSource{s->at("source").get<std::string>(), s->at("entry_function").get<std::string>(),
                                s->value("owner", std::string{})};
}

}  // namespace wpsenv::catalog

namespace wpsenv::wps {

void to_json(nlohmann::json& j, const DataTypeSpec& t) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LiteralType>) {
          j = {{"kind", "literal"}, {"base", x.base}};
        } else if constexpr (std::is_same_v<T, ComplexType>) {
          j = {{"kind", "complex"}, {"mime", x.mime}};
          if (x.encoding) j["encoding"] = *x.encoding;
          if (x.schema) j["schema"] = *x.schema;
        } else {
          j = {{"kind", "bbox"}, {"default_crs", x.default_crs}};
        }
      },
      t);
}

void from_json(const nlohmann::json& j, DataTypeSpec& t) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "literal") {
    t = LiteralType{j.at("base").get<std::string>()};
  } else if (kind == "complex") {
    ComplexType c;
    c.mime = j.at("mime").get<std::string>();
    if (auto e = j.find("encoding"); e != j.end() && !e->is_null()) c.encoding = e->get<std::string>();
    if (auto s = j.find("schema"); s != j.end() && !s->is_null()) c.schema = s->get<std::string>();
    t = c;
  } else if (kind == "bbox") {
    t = BBoxType{j.value("default_crs", std::string{"EPSG:4326"})};
  } else {
    throw wpsenv::ValidationError("unknown data type kind " + kind);
  }
  check(t);
}

void to_json(nlohmann::json& j, const ParamDecl& p) {
  j = {{"identifier", p.identifier},
       {"title", p.title},
       {"min_occurs", p.min_occurs},
       {"max_occurs", p.max_occurs},
       {"dtype", p.dtype}};
}

void from_json(const nlohmann::json& j, ParamDecl& p) {
  p.identifier = j.at("identifier").get<std::string>();
  p.title = j.value("title", p.identifier);
  p.min_occurs = j.value("min_occurs", 1u);
  p.max_occurs = j.value("max_occurs", 1u);
  p.dtype = j.at("dtype").get<DataTypeSpec>();
}

}  // namespace wpsenv::wps
