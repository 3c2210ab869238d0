#include "wpsenv/chaining.hpp"

#include <cctype>

#include "wpsenv/error.hpp"

namespace wpsenv::chaining {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  return true;
}

bool facet_ok(const std::optional<std::string>& produced, const std::optional<std::string>& consumed) {
  return !consumed || produced == consumed;
}

}  // namespace

bool types_chain(const wps::DataTypeSpec& produced, const wps::DataTypeSpec& consumed) {
  if (produced.index() != consumed.index()) return false;
  if (const auto* p = std::get_if<wps::LiteralType>(&produced))
    return iequals(p->base, std::get<wps::LiteralType>(consumed).base);
  if (std::holds_alternative<wps::BBoxType>(produced)) return true;
  const auto& p = std::get<wps::ComplexType>(produced);
  const auto& c = std::get<wps::ComplexType>(consumed);
  return iequals(p.mime, c.mime) && facet_ok(p.encoding, c.encoding) && facet_ok(p.schema, c.schema);
}

bool can_chain(const TypedSlot& producer, const TypedSlot& consumer) {
  if (producer.direction != Direction::Out) throw PreconditionError("producer slot must be an output");
  if (consumer.direction != Direction::In) throw PreconditionError("consumer slot must be an input");
  return types_chain(producer.dtype, consumer.dtype);
}

std::vector<TypedSlot> slots_of(const catalog::ProcessDescriptor& d) {
  std::vector<TypedSlot> out;
  for (const auto& p : d.inputs) out.push_back({d.local_id, p.decl.identifier, Direction::In, p.decl.dtype});
  for (const auto& p : d.outputs) out.push_back({d.local_id, p.decl.identifier, Direction::Out, p.decl.dtype});
  return out;
}

std::vector<ChainPair> chainable_pairs(const std::vector<catalog::ProcessDescriptor>& catalog) {
  std::vector<TypedSlot> producers, consumers;
  for (const auto& d : catalog)
    for (auto& s : slots_of(d)) (s.direction == Direction::Out ? producers : consumers).push_back(std::move(s));
  std::vector<ChainPair> out;
  for (const auto& p : producers)
    for (const auto& c : consumers)
      if (can_chain(p, c)) out.push_back({p, c});
  return out;
}

}  // namespace wpsenv::chaining
