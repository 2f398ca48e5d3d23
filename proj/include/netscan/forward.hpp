#pragma once

#include <array>

#include "netscan/adjacency.hpp"
#include "netscan/model.hpp"
#include "netscan/tape.hpp"

namespace netscan {

struct Prediction {
  std::array<double, 2> probs{0.5, 0.5};
  std::array<double, 2> logits{0.0, 0.0};
  int label = 0;  // argmax; exact tie -> benign (0)
};

Prediction prediction_from_logits(double l0, double l1);

/// Per-sample loss -log(probs[y]) with the probability clamped at 1e-12.
double cross_entropy(const std::array<double, 2>& probs, int y);

// ---- value-path layer ops (also the oracle targets) ----

/// sigma(norm * H * W); ReLU optional so the pooling scorer can reuse it.
Matrix gcn_layer(const Matrix& h, const NormalizedAdjacency& norm, const Matrix& w,
                 bool apply_relu = true);

/// Per-node GIN update MLP(h_v + sum_{u in N(v)} h_u), N(v) excluding v.
Matrix gin_layer(const Matrix& h, const NormalizedAdjacency& norm, const GinMlp& mlp);

/// Classifier head on a single graph embedding.
Prediction classify(const std::vector<double>& h_g, const Model& model);

/// Attention top-k pooling: scores = tanh(one GCN layer with output dim 1);
/// keeps the ceil(k*N) best nodes (ties -> lower id). Returned rows are
/// score-gated when `gating` is set.
struct PoolResult {
  Matrix h;               // kept rows (gated if requested)
  std::vector<int> kept;  // kept node ids, ascending
  Dfg subgraph;           // induced subgraph with remapped dense ids
  Matrix scores;          // N x 1 pre-filter scores
};
PoolResult attention_pool(const Matrix& h, const Dfg& dfg, const NormalizedAdjacency& norm,
                          const Matrix& pool_w, double ratio, bool gating);

/// Readout on the value path (GCN single-matrix variant).
std::vector<double> readout_rows(const Matrix& h, Readout mode);

// ---- tape forward (training + inference) ----

struct EdgeMask {
  Var mask;                           // |E| x 1, values in [0,1]
  const MaskableAdjacency* adj = nullptr;
};

struct ForwardResult {
  std::vector<Prediction> preds;
  Var logits_var;                      // B x 2
  Var h_g_var;                         // B x D
  Matrix h_g;                          // value snapshot of h_g_var
  Matrix node_embeddings;              // final-layer node embeddings (pre-pool)
  std::vector<Var> param_vars;         // aligned with Model::params()
  std::vector<std::vector<int>> kept;  // per-graph kept node ids (empty without pooling)
};

/// Disjoint-union batch forward. `features[i]` and `adjs[i]` describe graph i.
/// An edge mask restricts the batch to a single graph.
ForwardResult forward_batch(Tape& tape, const std::vector<const Matrix*>& features,
                            const std::vector<const NormalizedAdjacency*>& adjs,
                            const Model& model, bool training, Rng* rng,
                            const EdgeMask* mask = nullptr);

}  // namespace netscan
