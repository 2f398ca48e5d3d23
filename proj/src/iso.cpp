#include "netscan/iso.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace netscan {

namespace {

struct Graph {
  int n = 0;
  std::vector<std::vector<int>> out, in;
  std::unordered_set<int64_t> edge_set;

  explicit Graph(const Dfg& d) : n(d.node_count()), out(d.out_neighbors()), in(d.in_neighbors()) {
    for (const auto& [u, v] : d.edges) edge_set.insert(key(u, v));
  }
  static int64_t key(int u, int v) { return static_cast<int64_t>(u) * (1LL << 31) + v; }
  bool has_edge(int u, int v) const { return edge_set.count(key(u, v)) > 0; }
};

// Joint color refinement; returns per-node colors comparable across graphs.
std::pair<std::vector<int>, std::vector<int>> refine(const Dfg& da, const Dfg& db,
                                                     const Graph& ga, const Graph& gb) {
  std::vector<int> ca(static_cast<size_t>(ga.n)), cb(static_cast<size_t>(gb.n));
  for (int i = 0; i < ga.n; ++i) ca[static_cast<size_t>(i)] = kind_index(da.nodes[static_cast<size_t>(i)].kind);
  for (int i = 0; i < gb.n; ++i) cb[static_cast<size_t>(i)] = kind_index(db.nodes[static_cast<size_t>(i)].kind);

  for (int round = 0; round < 32; ++round) {
    using Sig = std::tuple<int, std::vector<int>, std::vector<int>>;
    std::map<Sig, int> next_id;
    auto signature = [&](const Graph& g, const std::vector<int>& c, int v) {
      std::vector<int> ins, outs;
      for (int u : g.in[static_cast<size_t>(v)]) ins.push_back(c[static_cast<size_t>(u)]);
      for (int u : g.out[static_cast<size_t>(v)]) outs.push_back(c[static_cast<size_t>(u)]);
      std::sort(ins.begin(), ins.end());
      std::sort(outs.begin(), outs.end());
      return Sig{c[static_cast<size_t>(v)], std::move(ins), std::move(outs)};
    };
    std::vector<int> na(ca.size()), nb(cb.size());
    auto assign = [&](const Graph& g, const std::vector<int>& c, std::vector<int>& out) {
      for (int v = 0; v < g.n; ++v) {
        Sig s = signature(g, c, v);
        auto [it, fresh] = next_id.emplace(std::move(s), static_cast<int>(next_id.size()));
        out[static_cast<size_t>(v)] = it->second;
      }
    };
    assign(ga, ca, na);
    assign(gb, cb, nb);
    const bool stable = static_cast<size_t>(next_id.size()) ==
                        [&] {
                          std::unordered_set<int> u(ca.begin(), ca.end());
                          u.insert(cb.begin(), cb.end());
                          return u.size();
                        }();
    ca.swap(na);
    cb.swap(nb);
    if (stable) break;
  }
  return {ca, cb};
}

class Matcher {
 public:
  Matcher(const Graph& a, const Graph& b, std::vector<int> ca, std::vector<int> cb)
      : a_(a), b_(b), ca_(std::move(ca)), cb_(std::move(cb)) {}

  bool run() {
    map_ab_.assign(static_cast<size_t>(a_.n), -1);
    map_ba_.assign(static_cast<size_t>(b_.n), -1);
    return extend(0);
  }

 private:
  // Pick the unmatched a-node with the fewest same-color candidates,
  // preferring nodes adjacent to the matched region to stay anchored.
  int pick() const {
    int best = -1;
    long best_score = -1;
    for (int v = 0; v < a_.n; ++v) {
      if (map_ab_[static_cast<size_t>(v)] >= 0) continue;
      bool anchored = false;
      for (int u : a_.in[static_cast<size_t>(v)])
        if (map_ab_[static_cast<size_t>(u)] >= 0) anchored = true;
      for (int u : a_.out[static_cast<size_t>(v)])
        if (map_ab_[static_cast<size_t>(u)] >= 0) anchored = true;
      long cand = 0;
      for (int w = 0; w < b_.n; ++w)
        if (map_ba_[static_cast<size_t>(w)] < 0 && cb_[static_cast<size_t>(w)] == ca_[static_cast<size_t>(v)]) ++cand;
      long score = (anchored ? 0 : 1000000L) + cand;
      if (best < 0 || score < best_score) {
        best = v;
        best_score = score;
      }
    }
    return best;
  }

  bool feasible(int v, int w) const {
    if (ca_[static_cast<size_t>(v)] != cb_[static_cast<size_t>(w)]) return false;
    for (int u : a_.in[static_cast<size_t>(v)]) {
      int m = map_ab_[static_cast<size_t>(u)];
      if (m >= 0 && !b_.has_edge(m, w)) return false;
    }
    for (int u : a_.out[static_cast<size_t>(v)]) {
      int m = map_ab_[static_cast<size_t>(u)];
      if (m >= 0 && !b_.has_edge(w, m)) return false;
    }
    for (int u : b_.in[static_cast<size_t>(w)]) {
      int m = map_ba_[static_cast<size_t>(u)];
      if (m >= 0 && !a_.has_edge(m, v)) return false;
    }
    for (int u : b_.out[static_cast<size_t>(w)]) {
      int m = map_ba_[static_cast<size_t>(u)];
      if (m >= 0 && !a_.has_edge(v, m)) return false;
    }
    return true;
  }

  bool extend(int depth) {
    if (depth == a_.n) return true;
    const int v = pick();
    for (int w = 0; w < b_.n; ++w) {
      if (map_ba_[static_cast<size_t>(w)] >= 0) continue;
      if (!feasible(v, w)) continue;
      map_ab_[static_cast<size_t>(v)] = w;
      map_ba_[static_cast<size_t>(w)] = v;
      if (extend(depth + 1)) return true;
      map_ab_[static_cast<size_t>(v)] = -1;
      map_ba_[static_cast<size_t>(w)] = -1;
    }
    return false;
  }

  const Graph& a_;
  const Graph& b_;
  std::vector<int> ca_, cb_;
  std::vector<int> map_ab_, map_ba_;
};

}  // namespace

bool dfg_isomorphic(const Dfg& a, const Dfg& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;

  std::vector<int> ka(static_cast<size_t>(kNodeKindCount), 0), kb(static_cast<size_t>(kNodeKindCount), 0);
  for (const auto& n : a.nodes) ++ka[static_cast<size_t>(kind_index(n.kind))];
  for (const auto& n : b.nodes) ++kb[static_cast<size_t>(kind_index(n.kind))];
  if (ka != kb) return false;

  Graph ga(a), gb(b);
  auto [ca, cb] = refine(a, b, ga, gb);

  // color histograms must agree
  std::map<int, int> ha, hb;
  for (int c : ca) ++ha[c];
  for (int c : cb) ++hb[c];
  if (ha != hb) return false;

  return Matcher(ga, gb, std::move(ca), std::move(cb)).run();
}

}  // namespace netscan
