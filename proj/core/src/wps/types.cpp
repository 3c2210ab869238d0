#include "wpsenv/wps/types.hpp"

#include <fmt/format.h>

#include "wpsenv/error.hpp"

namespace wpsenv::wps {

void check(const DataTypeSpec& t) {
  if (auto* lit = std::get_if<LiteralType>(&t); lit && lit->base.empty())
    throw ValidationError("literal data type needs a base type");
  if (auto* cx = std::get_if<ComplexType>(&t); cx && cx->mime.empty())
    throw ValidationError("complex data type needs a mime type");
}

std::string describe(const DataTypeSpec& t) {
  if (auto* lit = std::get_if<LiteralType>(&t)) return fmt::format("Literal({})", lit->base);
  if (auto* bb = std::get_if<BBoxType>(&t)) return fmt::format("BBox({})", bb->default_crs);
  const auto& cx = std::get<ComplexType>(t);
  return fmt::format("Complex({},{},{})", cx.mime, cx.encoding.value_or("-"), cx.schema.value_or("-"));
}

const ParamDecl* ProcessDescription::find_input(std::string_view id) const {
  for (const auto& p : inputs)
    if (p.identifier == id) return &p;
  return nullptr;
}

const ParamDecl* ProcessDescription::find_output(std::string_view id) const {
  for (const auto& p : outputs)
    if (p.identifier == id) return &p;
  return nullptr;
}

const char* state_name(const StatusState& s) {
  switch (s.index()) {
    case 0: return "accepted";
    case 1: return "started";
    case 2: return "succeeded";
    default: return "failed";
  }
}

}  // namespace wpsenv::wps
