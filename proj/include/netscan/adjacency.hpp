#pragma once

#include <vector>

#include "netscan/dfg.hpp"
#include "netscan/tape.hpp"

namespace netscan {

/// How message passing reads the DFG's directed edges.
///   Undirected: symmetrize A (the default; the symmetric normalizer of the
///               GCN update presumes it)
///   Directed:   aggregate along rows of A as written
///   Reversed:   aggregate along rows of A^T
enum class EdgeDir { Undirected, Directed, Reversed };

EdgeDir edge_dir_from_string(const std::string& s);
const char* edge_dir_name(EdgeDir d);

/// Degree-normalized adjacency D^-1/2 (A+I) D^-1/2 stored as sparse
/// propagation entries, plus unit-weight neighbor entries for GIN sums.
struct NormalizedAdjacency {
  int n = 0;
  std::vector<PropagateEntry> gcn_entries;  // normalized, self-loops included
  std::vector<PropagateEntry> gin_entries;  // weight 1, no self-loops

  Matrix dense() const;  // N x N matrix of gcn_entries
};

NormalizedAdjacency normalize_adjacency(const Dfg& dfg, EdgeDir mode);

/// Maskable variants for the explainer: same structure with per-entry edge
/// ids into the mask vector (undirected mode maps one DFG edge to both
/// directions).
struct MaskableAdjacency {
  int n = 0;
  GcnMaskSupport gcn;             // off-diagonal support with mask slots
  std::vector<EdgeMsg> gin_msgs;  // neighbor-sum messages with mask slots
};

MaskableAdjacency maskable_adjacency(const Dfg& dfg, EdgeDir mode);

}  // namespace netscan
