#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wpsenv/time.hpp"

namespace wpsenv::wps {

inline constexpr const char* kWpsNs = "http://www.opengis.net/wps/1.0.0";
inline constexpr const char* kOwsNs = "http://www.opengis.net/ows/1.1";
inline constexpr const char* kXlinkNs = "http://www.w3.org/1999/xlink";
inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Data types

struct LiteralType {
  std::string base;  // "string", "double", "integer", "boolean", ...
  bool operator==(const LiteralType&) const = default;
};

struct ComplexType {
  std::string mime;
  std::optional<std::string> encoding;
  std::optional<std::string> schema;
  bool operator==(const ComplexType&) const = default;
};

struct BBoxType {
  std::string default_crs;
  bool operator==(const BBoxType&) const = default;
};

/// The type of a parameter: literal, complex (mime/encoding/schema) or
/// bounding box.
using DataTypeSpec = std::variant<LiteralType, ComplexType, BBoxType>;

/// Throws ValidationError if the spec violates its invariants.
void check(const DataTypeSpec& t);

std::string describe(const DataTypeSpec& t);

struct ParamDecl {
  std::string identifier;
  std::string title;
  unsigned min_occurs = 1;
  unsigned max_occurs = 1;
  DataTypeSpec dtype = LiteralType{"string"};
  bool operator==(const ParamDecl&) const = default;
};

struct ProcessBrief {
  std::string identifier;
  std::string title;
  std::optional<std::string> abstract;
  bool operator==(const ProcessBrief&) const = default;
};

struct CapabilitiesDoc {
  std::string service_title;
  std::vector<ProcessBrief> process_briefs;
  bool operator==(const CapabilitiesDoc&) const = default;
};

struct ProcessDescription {
  std::string identifier;
  std::string title;
  std::optional<std::string> abstract;
  std::vector<ParamDecl> inputs;
  std::vector<ParamDecl> outputs;
  bool store_supported = false;
  bool status_supported = false;
  bool operator==(const ProcessDescription&) const = default;

  const ParamDecl* find_input(std::string_view id) const;
  const ParamDecl* find_output(std::string_view id) const;
};

// ---------------------------------------------------------------------------
// Values

struct LiteralVal {
  std::string text;
  bool operator==(const LiteralVal&) const = default;
};

struct ComplexRef {
  std::string href;
  std::string mime;
  bool operator==(const ComplexRef&) const = default;
};

struct ComplexInline {
  std::string body;
  std::string mime;
  bool operator==(const ComplexInline&) const = default;
};

struct BBoxVal {
  double minx = 0, miny = 0, maxx = 0, maxy = 0;
  std::string crs;
  bool operator==(const BBoxVal&) const = default;
};

using InputValue = std::variant<LiteralVal, ComplexRef, ComplexInline, BBoxVal>;
using NamedValue = std::pair<std::string, InputValue>;

struct ResponseForm {
  bool store_results = false;
  bool status = false;
  std::vector<std::string> requested_outputs;
  bool operator==(const ResponseForm&) const = default;
};

struct ExecuteRequest {
  std::string process_id;
  std::vector<NamedValue> inputs;
  ResponseForm response_form;
  bool operator==(const ExecuteRequest&) const = default;
};

// ---------------------------------------------------------------------------
// Status

struct Accepted {
  bool operator==(const Accepted&) const = default;
};
struct Started {
  int percent = 0;  // 0..99
  bool operator==(const Started&) const = default;
};
struct Succeeded {
  bool operator==(const Succeeded&) const = default;
};
struct Failed {
  std::string message;
  bool operator==(const Failed&) const = default;
};

using StatusState = std::variant<Accepted, Started, Succeeded, Failed>;

struct ExecuteStatus {
  StatusState state = Accepted{};
  Instant timestamp{};
  bool operator==(const ExecuteStatus&) const = default;

  bool terminal() const {
    return std::holds_alternative<Succeeded>(state) || std::holds_alternative<Failed>(state);
  }
};

/// "accepted", "started", "succeeded" or "failed".
const char* state_name(const StatusState& s);

struct ExecuteResponse {
  std::string process_id;
  ExecuteStatus status;
  std::optional<std::string> status_location;
  std::vector<NamedValue> outputs;
  bool operator==(const ExecuteResponse&) const = default;
};

struct ExceptionReport {
  std::string code;
  std::string text;
  std::optional<std::string> locator;
};

}  // namespace wpsenv::wps
