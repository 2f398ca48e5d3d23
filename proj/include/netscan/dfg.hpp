#pragma once

#include <string>
#include <utility>
#include <vector>

#include "netscan/elaborate.hpp"
#include "netscan/matrix.hpp"
#include "netscan/node_kind.hpp"

namespace netscan {

struct DfgNode {
  int id = 0;
  NodeKind kind = NodeKind::Terminal;
  std::string name;  // signal name for terminals, context label for operators
};

/// Merged signal-rooted data-flow graph. Edges are directed operand ->
/// operation; node ids are dense from 0 in construction order.
struct Dfg {
  std::vector<DfgNode> nodes;
  std::vector<std::pair<int, int>> edges;  // (src, dst), no duplicates

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  /// Dense 0/1 adjacency; A[u][v] = 1 iff (u,v) is an edge.
  Matrix adjacency() const;

  std::vector<std::vector<int>> out_neighbors() const;
  std::vector<std::vector<int>> in_neighbors() const;

  /// Throws if an invariant is broken (bad endpoints, duplicate edges).
  void validate() const;

  /// Canonical JSON with sorted keys; byte-identical for identical graphs.
  std::string to_json() const;
  static Dfg from_json(const std::string& text);
};

/// Build the merged DFG: one terminal per signal, one operator node per
/// operator occurrence, edges operand -> operation and expression root ->
/// driven terminal. Sequential ops insert a Dff/Latch node between the data
/// input and the output terminal.
Dfg build_dfg(const ElaboratedDesign& design);

/// Convenience: parse + elaborate + build. `top` empty means auto-detect.
Dfg dfg_from_text(std::string_view text, const std::string& top = "");
Dfg dfg_from_file(const std::string& path, const std::string& top = "");

}  // namespace netscan
