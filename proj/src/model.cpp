#include "netscan/model.hpp"

#include "netscan/errors.hpp"
#include "netscan/rng.hpp"

namespace netscan {

Arch arch_from_string(const std::string& s) {
  if (s == "gcn") return Arch::Gcn;
  if (s == "gin") return Arch::Gin;
  throw ScanError(Err::ConfigError, "architecture must be gcn|gin, got '" + s + "'");
}

const char* arch_name(Arch a) { return a == Arch::Gcn ? "gcn" : "gin"; }

Readout readout_from_string(const std::string& s) {
  if (s == "sum") return Readout::Sum;
  if (s == "mean") return Readout::Mean;
  if (s == "max") return Readout::Max;
  throw ScanError(Err::ConfigError, "readout must be sum|mean|max, got '" + s + "'");
}

const char* readout_name(Readout r) {
  switch (r) {
    case Readout::Sum: return "sum";
    case Readout::Mean: return "mean";
    case Readout::Max: return "max";
  }
  return "?";
}

void ModelConfig::validate() const {
  if (layers < 1) throw ScanError(Err::ConfigError, "layers must be >= 1");
  if (hidden < 1) throw ScanError(Err::ConfigError, "hidden must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ScanError(Err::ConfigError, "dropout must be in [0,1)");
  if (pool_ratio < 0.0 || pool_ratio > 1.0)
    throw ScanError(Err::ConfigError, "pool ratio must be in (0,1]; 0 disables pooling");
  if (in_dim != kNodeKindCount)
    throw ScanError(Err::ConfigError, "feature width must be " + std::to_string(kNodeKindCount));
  if (arch == Arch::Gin && readout != Readout::Sum)
    throw ScanError(Err::ConfigError, "the layer-concatenating GIN readout sums per layer");
}

Model Model::init(const ModelConfig& cfg, uint64_t seed) {
  cfg.validate();
  Model m;
  m.cfg = cfg;
  m.init_seed = seed;
  Rng rng = Rng(seed).split(0xabc0);

  int in = cfg.in_dim;
  for (int l = 0; l < cfg.layers; ++l) {
    if (cfg.arch == Arch::Gcn) {
      m.gcn_w.push_back(glorot(in, cfg.hidden, rng));
    } else {
      GinMlp mlp;
      mlp.l1.w = glorot(in, cfg.hidden, rng);
      mlp.l1.b = Matrix(1, cfg.hidden);
      mlp.l2.w = glorot(cfg.hidden, cfg.hidden, rng);
      mlp.l2.b = Matrix(1, cfg.hidden);
      m.gin_mlp.push_back(std::move(mlp));
    }
    in = cfg.hidden;
  }
  if (cfg.pooling()) m.pool_w = glorot(cfg.hidden, 1, rng);

  const int d = cfg.embedding_dim();
  const int hh = cfg.head_hidden_dim();
  m.head1.w = glorot(d, hh, rng);
  m.head1.b = Matrix(1, hh);
  m.head2.w = glorot(hh, 2, rng);
  m.head2.b = Matrix(1, 2);
  return m;
}

std::vector<Matrix*> Model::params() {
  std::vector<Matrix*> out;
  for (auto& w : gcn_w) out.push_back(&w);
  for (auto& mlp : gin_mlp) {
    out.push_back(&mlp.l1.w);
    out.push_back(&mlp.l1.b);
    out.push_back(&mlp.l2.w);
    out.push_back(&mlp.l2.b);
  }
  if (cfg.pooling()) out.push_back(&pool_w);
  out.push_back(&head1.w);
  out.push_back(&head1.b);
  out.push_back(&head2.w);
  out.push_back(&head2.b);
  return out;
}

std::vector<const Matrix*> Model::params() const {
  auto mut = const_cast<Model*>(this)->params();
  return std::vector<const Matrix*>(mut.begin(), mut.end());
}

size_t Model::param_count() const {
  size_t n = 0;
  for (const Matrix* p : params()) n += p->size();
  return n;
}

}  // namespace netscan
