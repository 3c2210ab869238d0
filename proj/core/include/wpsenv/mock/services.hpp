#pragma once

#include <vector>

#include "wpsenv/catalog/catalog.hpp"
#include "wpsenv/exec/executor.hpp"

namespace wpsenv::mock {

/// Catalog descriptors (kind LocalBuiltin, endpoint LOCAL, no local_id) of
/// vector2grid, road2grid, g_sum and slow_echo.
std::vector<catalog::ProcessDescriptor> builtin_descriptors();

/// Adds every builtin whose wrapper is not yet registered.
void register_builtins(catalog::Catalog& catalog);

/// Runs the builtins in-process.
class MockRunner : public exec::LocalRunner {
 public:
  std::vector<exec::RunnerOutput> run(const catalog::ProcessDescriptor& desc, const std::vector<wps::NamedValue>& inputs,
                                      exec::RunContext& ctx) override;
};

}  // namespace wpsenv::mock
