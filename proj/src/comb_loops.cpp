#include "netscan/comb_loops.hpp"

#include <algorithm>
#include <functional>

namespace netscan {

namespace {

// Adjacency restricted to combinational (non Dff/Latch) nodes.
std::vector<std::vector<int>> comb_adjacency(const Dfg& dfg) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(dfg.node_count()));
  for (const auto& [u, v] : dfg.edges) {
    if (is_sequential(dfg.nodes[static_cast<size_t>(u)].kind)) continue;
    if (is_sequential(dfg.nodes[static_cast<size_t>(v)].kind)) continue;
    adj[static_cast<size_t>(u)].push_back(v);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

// Johnson's elementary-cycle enumeration on the combinational subgraph.
class CycleFinder {
 public:
  CycleFinder(std::vector<std::vector<int>> adj, size_t max_cycles)
      : adj_(std::move(adj)), n_(static_cast<int>(adj_.size())), max_cycles_(max_cycles) {}

  std::vector<std::vector<int>> run() {
    blocked_.assign(static_cast<size_t>(n_), false);
    block_map_.assign(static_cast<size_t>(n_), {});
    for (start_ = 0; start_ < n_ && cycles_.size() < max_cycles_; ++start_) {
      for (int i = start_; i < n_; ++i) {
        blocked_[static_cast<size_t>(i)] = false;
        block_map_[static_cast<size_t>(i)].clear();
      }
      path_.clear();
      circuit(start_);
    }
    return std::move(cycles_);
  }

 private:
  bool circuit(int v) {
    bool found = false;
    path_.push_back(v);
    blocked_[static_cast<size_t>(v)] = true;
    for (int w : adj_[static_cast<size_t>(v)]) {
      if (w < start_) continue;  // only consider nodes >= current root
      if (cycles_.size() >= max_cycles_) break;
      if (w == start_) {
        cycles_.push_back(path_);  // path already starts at the smallest id
        found = true;
      } else if (!blocked_[static_cast<size_t>(w)]) {
        if (circuit(w)) found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (int w : adj_[static_cast<size_t>(v)]) {
        if (w < start_) continue;
        auto& lst = block_map_[static_cast<size_t>(w)];
        if (std::find(lst.begin(), lst.end(), v) == lst.end()) lst.push_back(v);
      }
    }
    path_.pop_back();
    return found;
  }

  void unblock(int v) {
    blocked_[static_cast<size_t>(v)] = false;
    auto lst = std::move(block_map_[static_cast<size_t>(v)]);
    block_map_[static_cast<size_t>(v)].clear();
    for (int w : lst)
      if (blocked_[static_cast<size_t>(w)]) unblock(w);
  }

  std::vector<std::vector<int>> adj_;
  int n_;
  size_t max_cycles_;
  int start_ = 0;
  std::vector<bool> blocked_;
  std::vector<std::vector<int>> block_map_;
  std::vector<int> path_;
  std::vector<std::vector<int>> cycles_;
};

}  // namespace

std::vector<std::vector<int>> detect_comb_loops(const Dfg& dfg, size_t max_cycles) {
  return CycleFinder(comb_adjacency(dfg), max_cycles).run();
}

bool has_comb_cycle(const Dfg& dfg) {
  auto adj = comb_adjacency(dfg);
  const int n = static_cast<int>(adj.size());
  std::vector<int> state(static_cast<size_t>(n), 0);  // 0 new, 1 on stack, 2 done
  std::function<bool(int)> dfs = [&](int u) {
    state[static_cast<size_t>(u)] = 1;
    for (int v : adj[static_cast<size_t>(u)]) {
      if (state[static_cast<size_t>(v)] == 1) return true;
      if (state[static_cast<size_t>(v)] == 0 && dfs(v)) return true;
    }
    state[static_cast<size_t>(u)] = 2;
    return false;
  };
  for (int u = 0; u < n; ++u)
    if (state[static_cast<size_t>(u)] == 0 && dfs(u)) return true;
  return false;
}

}  // namespace netscan
