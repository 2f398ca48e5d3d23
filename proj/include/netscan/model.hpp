#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netscan/adjacency.hpp"
#include "netscan/matrix.hpp"
#include "netscan/node_kind.hpp"

namespace netscan {

enum class Arch { Gcn, Gin };
enum class Readout { Sum, Mean, Max };

Arch arch_from_string(const std::string& s);
const char* arch_name(Arch a);
Readout readout_from_string(const std::string& s);
const char* readout_name(Readout r);

struct ModelConfig {
  Arch arch = Arch::Gin;
  int layers = 2;
  int hidden = 100;
  double dropout = 0.5;
  Readout readout = Readout::Sum;  // GCN only; GIN always sums per layer
  double pool_ratio = 0.0;         // 0 disables attention pooling
  bool pool_gating = true;
  EdgeDir edge_dir = EdgeDir::Undirected;
  int head_hidden = 0;  // 0 -> hidden
  int in_dim = kNodeKindCount;

  bool pooling() const { return pool_ratio > 0.0; }
  int head_hidden_dim() const { return head_hidden > 0 ? head_hidden : hidden; }
  /// |h_G|: GCN uses the final layer; GIN concatenates layers 0..L.
  int embedding_dim() const {
    return arch == Arch::Gcn ? hidden : in_dim + layers * hidden;
  }
  void validate() const;
};

struct DenseLayer {
  Matrix w;
  Matrix b;  // 1 x out
};

struct GinMlp {
  DenseLayer l1;  // in -> out, ReLU
  DenseLayer l2;  // out -> out
};

struct Model {
  ModelConfig cfg;
  std::vector<Matrix> gcn_w;    // GCN: layer weights (in x out), no bias
  std::vector<GinMlp> gin_mlp;  // GIN: per-layer update MLPs
  Matrix pool_w;                // hidden x 1 scorer (GCN layer, tanh outside)
  DenseLayer head1, head2;      // classifier: D -> Hh -> 2
  uint64_t init_seed = 0;

  static Model init(const ModelConfig& cfg, uint64_t seed);

  /// Trainable parameters in a stable order (optimizer state aligns with it).
  std::vector<Matrix*> params();
  std::vector<const Matrix*> params() const;
  size_t param_count() const;
};

}  // namespace netscan
