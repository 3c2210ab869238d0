#pragma once

#include <string>
#include <vector>

#include "wpsenv/catalog/descriptor.hpp"
#include "wpsenv/wps/types.hpp"

namespace wpsenv::chaining {

enum class Direction { In, Out };

/// One parameter of one registered service, seen as a typed data slot.
struct TypedSlot {
  std::string owner_process;  // descriptor local_id
  std::string param_id;
  Direction direction = Direction::In;
  wps::DataTypeSpec dtype;
  bool operator==(const TypedSlot&) const = default;
};

struct ChainPair {
  TypedSlot producer;
  TypedSlot consumer;
  bool operator==(const ChainPair&) const = default;
};

/// Whether data produced at `producer` may be fed to `consumer`:
///  - Literal/Literal with case-insensitively equal base types,
///  - BBox/BBox regardless of CRS,
///  - Complex/Complex with case-insensitively equal mime, where an absent
///    encoding or schema on the consumer accepts anything and an absent one
///    on the producer only satisfies an absent consumer constraint.
/// Throws PreconditionError unless producer is Out and consumer is In.
bool can_chain(const TypedSlot& producer, const TypedSlot& consumer);

/// Type-level rule behind can_chain.
bool types_chain(const wps::DataTypeSpec& produced, const wps::DataTypeSpec& consumed);

std::vector<TypedSlot> slots_of(const catalog::ProcessDescriptor& d);

/// Every (output, input) pair across the catalog, including a service's
/// output feeding its own input, in catalog/parameter order.
std::vector<ChainPair> chainable_pairs(const std::vector<catalog::ProcessDescriptor>& catalog);

}  // namespace wpsenv::chaining
