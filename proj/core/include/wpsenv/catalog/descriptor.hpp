#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpsenv/wps/types.hpp"

namespace wpsenv::catalog {

enum class WidgetKind { Edit, Number, Checkbox, Rectangle, File, FileSave, SelectTable, SelectTableAttr };

std::string_view to_string(WidgetKind k);
std::optional<WidgetKind> widget_kind_from_string(std::string_view s);

struct WidgetDescriptor {
  WidgetKind kind = WidgetKind::Edit;
  std::optional<double> min;  // number only
  std::optional<double> max;  // number only
  std::optional<std::string> default_value;
  bool operator==(const WidgetDescriptor&) const = default;
};

/// Throws ValidationError when constraints are set on a non-number widget
/// or min > max.
void check(const WidgetDescriptor& w);

/// edit/select_table/select_table_attr <-> Literal(string),
/// number <-> Literal(double|integer), checkbox <-> Literal(boolean),
/// rectangle <-> BBox, file/file_save <-> Complex.
bool widget_compatible(WidgetKind kind, const wps::DataTypeSpec& dtype);

/// Widget used when registration does not bind one explicitly.
WidgetKind default_widget(const wps::DataTypeSpec& dtype, bool output);

/// Data type implied by a widget, used when a scenario package declares a
/// parameter by widget only.
wps::DataTypeSpec implied_dtype(WidgetKind kind);

struct BoundParam {
  wps::ParamDecl decl;
  WidgetDescriptor widget;
  std::string human_name;
  std::string human_description;
  bool operator==(const BoundParam&) const = default;
};

enum class ProcessKind { Remote, LocalBuiltin, Scenario };

std::string_view to_string(ProcessKind k);

inline constexpr std::string_view kLocalEndpoint = "LOCAL";

struct ScenarioSource {
  std::string source;
  std::string entry_function;
  std::string owner;
  bool operator==(const ScenarioSource&) const = default;
};

struct ProcessDescriptor {
  std::string local_id;
  std::string display_name;
  std::string description;
  std::string endpoint;  // absolute URL or kLocalEndpoint
  std::string remote_identifier;
  std::vector<BoundParam> inputs;
  std::vector<BoundParam> outputs;
  std::string wrapper_name;
  ProcessKind kind = ProcessKind::Remote;
  bool store_supported = false;
  bool status_supported = false;
  std::optional<ScenarioSource> scenario;
  bool operator==(const ProcessDescriptor&) const = default;

  bool is_local() const { return kind != ProcessKind::Remote; }
  const BoundParam* find_input(std::string_view id) const;
  const BoundParam* find_output(std::string_view id) const;

  /// The WPS-side view of this descriptor (what DescribeProcess serves).
  wps::ProcessDescription to_process_description() const;
};

bool valid_wrapper_name(std::string_view name);

void to_json(nlohmann::json& j, const WidgetDescriptor& w);
void from_json(const nlohmann::json& j, WidgetDescriptor& w);
void to_json(nlohmann::json& j, const BoundParam& p);
void from_json(const nlohmann::json& j, BoundParam& p);
void to_json(nlohmann::json& j, const ProcessDescriptor& d);
void from_json(const nlohmann::json& j, ProcessDescriptor& d);

}  // namespace wpsenv::catalog

namespace wpsenv::wps {
void to_json(nlohmann::json& j, const DataTypeSpec& t);
void from_json(const nlohmann::json& j, DataTypeSpec& t);
void to_json(nlohmann::json& j, const ParamDecl& p);
void from_json(const nlohmann::json& j, ParamDecl& p);
}  // namespace wpsenv::wps
