#pragma once

#include "netscan/dfg.hpp"

namespace netscan {

/// Kind-preserving directed-graph isomorphism test. Color-refinement
/// invariants prune a VF2-style backtracking search; intended for corpus-size
/// graphs (the round-trip acceptance check).
bool dfg_isomorphic(const Dfg& a, const Dfg& b);

}  // namespace netscan
