#pragma once

#include <functional>
#include <vector>

#include "netscan/matrix.hpp"
#include "netscan/rng.hpp"

namespace netscan {

/// Handle into a Tape. Cheap to copy; only valid for the tape that issued it.
struct Var {
  int i = -1;
  bool valid() const { return i >= 0; }
};

/// out[dst,:] += w * h[src,:]. Used for normalized-adjacency propagation
/// (weights from the degree normalizer) and GIN neighbor sums (w = 1).
struct PropagateEntry {
  int dst;
  int src;
  double w;
};

/// One message along a maskable edge: out[dst,:] += mask[edge] * h[src,:].
struct EdgeMsg {
  int dst;
  int src;
  int edge;
};

/// Off-diagonal support of a masked GCN adjacency. Each cell (i,j) carries the
/// mask slots feeding it; the effective weight is the smooth OR
/// 1 - prod_e(1 - m_e), which reduces to m_e for the common single-edge cell.
/// Self-loops (weight 1) are implicit on every diagonal entry.
struct GcnMaskSupport {
  int n = 0;
  struct Cell {
    int i;
    int j;
    std::vector<int> edges;
  };
  std::vector<Cell> cells;
};

/// Reverse-mode tape over Matrix-valued operations. Build a computation by
/// calling ops, then backward() once on a scalar; gradients of leaves that do
/// not reach the loss stay exactly zero.
class Tape {
 public:
  Var leaf(Matrix value);

  const Matrix& val(Var v) const;
  const Matrix& grad(Var v) const;

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var add_rowvec(Var m, Var bias);  // bias is 1xC, added to every row
  Var relu(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var hadamard(Var a, Var b);
  Var scale(Var a, double s);
  Var row_scale(Var m, Var s);  // s is Nx1; row r of m scaled by s(r,0)
  Var gather_rows(Var m, std::vector<int> ids);
  Var concat_cols(const std::vector<Var>& parts);

  /// Per-row segment reductions; seg[r] in [0, nseg) maps row r to its graph.
  Var segment_sum(Var m, std::vector<int> seg, int nseg);
  Var segment_mean(Var m, std::vector<int> seg, int nseg);
  Var segment_max(Var m, std::vector<int> seg, int nseg);

  Var propagate(int out_rows, std::vector<PropagateEntry> entries, Var h);
  Var neighbor_sum_masked(std::vector<EdgeMsg> msgs, Var mask, Var h);
  Var gcn_propagate_masked(const GcnMaskSupport& sup, Var mask, Var h);

  Var dropout(Var a, double rate, Rng& rng, bool training);

  Var sum_all(Var a);   // 1x1
  Var mean_all(Var a);  // 1x1

  /// Elementwise Bernoulli entropy -m ln m - (1-m) ln(1-m), clamped at 1e-12.
  Var bernoulli_entropy(Var a);

  /// Mean negative log-likelihood of rows of `logits` (BxK) at `labels`.
  Var mean_nll(Var logits, std::vector<int> labels);

  /// Reverse sweep from a 1x1 scalar. A tape can be swept once.
  void backward(Var loss);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void(Tape&)> back;  // empty for leaves
  };

  Var push(Matrix value, std::function<void(Tape&)> back = {});
  Matrix& g(Var v) { return nodes_[static_cast<size_t>(v.i)].grad; }
  const Matrix& v(Var v) const { return nodes_[static_cast<size_t>(v.i)].value; }

  std::vector<Node> nodes_;
  bool swept_ = false;
};

}  // namespace netscan
