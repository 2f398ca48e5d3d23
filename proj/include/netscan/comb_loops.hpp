#pragma once

#include <vector>

#include "netscan/dfg.hpp"

namespace netscan {

/// Every elementary cycle of the DFG that passes through no Dff/Latch node
/// (the combinational-loop design-rule check). Each cycle is a node-id list
/// rotated to start at its smallest id; cycles are reported in a
/// deterministic order. `max_cycles` caps enumeration on pathological inputs.
std::vector<std::vector<int>> detect_comb_loops(const Dfg& dfg, size_t max_cycles = 100000);

/// Cheap existence check used by scan-time gating and tests.
bool has_comb_cycle(const Dfg& dfg);

}  // namespace netscan
