#include "netscan/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace netscan {

EdgeDir edge_dir_from_string(const std::string& s) {
  if (s == "undirected") return EdgeDir::Undirected;
  if (s == "directed") return EdgeDir::Directed;
  if (s == "reversed") return EdgeDir::Reversed;
  throw ScanError(Err::ConfigError, "edge-dir must be undirected|directed|reversed, got '" + s + "'");
}

const char* edge_dir_name(EdgeDir d) {
  switch (d) {
    case EdgeDir::Undirected: return "undirected";
    case EdgeDir::Directed: return "directed";
    case EdgeDir::Reversed: return "reversed";
  }
  return "?";
}

namespace {

// (receiver, sender) pairs of the aggregation matrix for the chosen mode,
// deduplicated, in deterministic order. For a DFG edge (u,v):
//   Directed mode aggregates row-wise over A, so u receives from v.
std::vector<std::pair<int, int>> aggregation_pairs(const Dfg& dfg, EdgeDir mode) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(dfg.edges.size() * 2);
  for (const auto& [u, v] : dfg.edges) {
    switch (mode) {
      case EdgeDir::Directed:
        pairs.emplace_back(u, v);
        break;
      case EdgeDir::Reversed:
        pairs.emplace_back(v, u);
        break;
      case EdgeDir::Undirected:
        pairs.emplace_back(u, v);
        pairs.emplace_back(v, u);
        break;
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

}  // namespace

Matrix NormalizedAdjacency::dense() const {
  Matrix m(n, n);
  for (const auto& e : gcn_entries) m.at(e.dst, e.src) = e.w;
  return m;
}

NormalizedAdjacency normalize_adjacency(const Dfg& dfg, EdgeDir mode) {
  NormalizedAdjacency out;
  out.n = dfg.node_count();
  auto pairs = aggregation_pairs(dfg, mode);

  std::vector<double> rowsum(static_cast<size_t>(out.n), 1.0);  // self-loop
  for (const auto& [i, j] : pairs) rowsum[static_cast<size_t>(i)] += 1.0;
  std::vector<double> inv_sqrt(static_cast<size_t>(out.n));
  for (int i = 0; i < out.n; ++i)
    inv_sqrt[static_cast<size_t>(i)] = 1.0 / std::sqrt(rowsum[static_cast<size_t>(i)]);

  out.gcn_entries.reserve(pairs.size() + static_cast<size_t>(out.n));
  for (int i = 0; i < out.n; ++i)
    out.gcn_entries.push_back({i, i, 1.0 / rowsum[static_cast<size_t>(i)]});
  for (const auto& [i, j] : pairs)
    out.gcn_entries.push_back({i, j, inv_sqrt[static_cast<size_t>(i)] * inv_sqrt[static_cast<size_t>(j)]});

  out.gin_entries.reserve(pairs.size());
  for (const auto& [i, j] : pairs) out.gin_entries.push_back({i, j, 1.0});
  return out;
}

MaskableAdjacency maskable_adjacency(const Dfg& dfg, EdgeDir mode) {
  MaskableAdjacency out;
  out.n = dfg.node_count();
  out.gcn.n = dfg.node_count();

  // (receiver, sender) -> contributing DFG edge indices
  std::map<std::pair<int, int>, std::vector<int>> cells;
  for (size_t e = 0; e < dfg.edges.size(); ++e) {
    const auto& [u, v] = dfg.edges[e];
    switch (mode) {
      case EdgeDir::Directed:
        cells[{u, v}].push_back(static_cast<int>(e));
        break;
      case EdgeDir::Reversed:
        cells[{v, u}].push_back(static_cast<int>(e));
        break;
      case EdgeDir::Undirected:
        cells[{u, v}].push_back(static_cast<int>(e));
        cells[{v, u}].push_back(static_cast<int>(e));
        break;
    }
  }
  for (auto& [key, edges] : cells) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out.gcn.cells.push_back({key.first, key.second, edges});
    // N(v) is a set: an antiparallel duplicate collapses onto the lower edge id
    out.gin_msgs.push_back({key.first, key.second, edges[0]});
  }
  return out;
}

}  // namespace netscan
