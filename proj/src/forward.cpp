#include "netscan/forward.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace netscan {

Prediction prediction_from_logits(double l0, double l1) {
  Prediction p;
  p.logits = {l0, l1};
  auto probs = softmax_row({l0, l1});
  p.probs = {probs[0], probs[1]};
  if (l1 > l0) {
    p.label = 1;
  } else {
    if (l1 == l0) std::cerr << "note: logit tie, predicting benign\n";
    p.label = 0;
  }
  return p;
}

double cross_entropy(const std::array<double, 2>& probs, int y) {
  return -std::log(std::max(probs[static_cast<size_t>(y)], 1e-12));
}

Matrix gcn_layer(const Matrix& h, const NormalizedAdjacency& norm, const Matrix& w,
                 bool apply_relu) {
  if (h.rows != norm.n) throw ScanError(Err::ShapeMismatch, "gcn_layer: H rows != N");
  if (h.cols != w.rows) throw ScanError(Err::ShapeMismatch, "gcn_layer: H cols != W rows");
  Matrix prop(norm.n, h.cols);
  for (const auto& e : norm.gcn_entries) {
    const double* src = h.row(e.src);
    double* dst = prop.row(e.dst);
    for (int c = 0; c < h.cols; ++c) dst[c] += e.w * src[c];
  }
  Matrix out = matmul(prop, w);
  if (apply_relu)
    for (auto& v : out.data)
      if (v < 0.0) v = 0.0;
  return out;
}

Matrix gin_layer(const Matrix& h, const NormalizedAdjacency& norm, const GinMlp& mlp) {
  if (h.rows != norm.n) throw ScanError(Err::ShapeMismatch, "gin_layer: H rows != N");
  Matrix pre = h;  // h_v + sum of neighbor embeddings
  for (const auto& e : norm.gin_entries) {
    const double* src = h.row(e.src);
    double* dst = pre.row(e.dst);
    for (int c = 0; c < h.cols; ++c) dst[c] += src[c];
  }
  Matrix z = matmul(pre, mlp.l1.w);
  for (int r = 0; r < z.rows; ++r)
    for (int c = 0; c < z.cols; ++c) {
      z.at(r, c) += mlp.l1.b.at(0, c);
      if (z.at(r, c) < 0.0) z.at(r, c) = 0.0;
    }
  Matrix out = matmul(z, mlp.l2.w);
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < out.cols; ++c) out.at(r, c) += mlp.l2.b.at(0, c);
  return out;
}

Prediction classify(const std::vector<double>& h_g, const Model& model) {
  if (static_cast<int>(h_g.size()) != model.head1.w.rows)
    throw ScanError(Err::ShapeMismatch, "classify: embedding dim mismatch");
  Matrix x(1, static_cast<int>(h_g.size()));
  for (size_t i = 0; i < h_g.size(); ++i) x.at(0, static_cast<int>(i)) = h_g[i];
  Matrix z = matmul(x, model.head1.w);
  for (int c = 0; c < z.cols; ++c) {
    z.at(0, c) += model.head1.b.at(0, c);
    if (z.at(0, c) < 0.0) z.at(0, c) = 0.0;
  }
  Matrix logits = matmul(z, model.head2.w);
  for (int c = 0; c < 2; ++c) logits.at(0, c) += model.head2.b.at(0, c);
  return prediction_from_logits(logits.at(0, 0), logits.at(0, 1));
}

namespace {

// ceil(k*N) top ids by score, ties broken by lower node id; ascending output.
std::vector<int> topk_ids(const double* scores, int n, double ratio) {
  const int keep = static_cast<int>(std::ceil(ratio * n));
  if (keep <= 0) throw ScanError(Err::EmptyGraph, "pooling kept zero nodes");
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  order.resize(static_cast<size_t>(std::min(keep, n)));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

PoolResult attention_pool(const Matrix& h, const Dfg& dfg, const NormalizedAdjacency& norm,
                          const Matrix& pool_w, double ratio, bool gating) {
  if (ratio <= 0.0 || ratio > 1.0) throw ScanError(Err::ConfigError, "pool ratio must be in (0,1]");
  Matrix s = gcn_layer(h, norm, pool_w, false);
  for (auto& v : s.data) v = std::tanh(v);

  PoolResult out;
  out.scores = s;
  out.kept = topk_ids(s.data.data(), h.rows, ratio);

  out.h = Matrix(static_cast<int>(out.kept.size()), h.cols);
  for (size_t r = 0; r < out.kept.size(); ++r) {
    const double g = gating ? s.at(out.kept[r], 0) : 1.0;
    for (int c = 0; c < h.cols; ++c) out.h.at(static_cast<int>(r), c) = g * h.at(out.kept[r], c);
  }

  std::vector<int> remap(static_cast<size_t>(dfg.node_count()), -1);
  for (size_t r = 0; r < out.kept.size(); ++r) remap[static_cast<size_t>(out.kept[r])] = static_cast<int>(r);
  for (int id : out.kept) {
    DfgNode n = dfg.nodes[static_cast<size_t>(id)];
    n.id = remap[static_cast<size_t>(id)];
    out.subgraph.nodes.push_back(std::move(n));
  }
  for (const auto& [u, v] : dfg.edges)
    if (remap[static_cast<size_t>(u)] >= 0 && remap[static_cast<size_t>(v)] >= 0)
      out.subgraph.edges.emplace_back(remap[static_cast<size_t>(u)], remap[static_cast<size_t>(v)]);
  return out;
}

std::vector<double> readout_rows(const Matrix& h, Readout mode) {
  if (h.rows == 0) throw ScanError(Err::EmptyGraph, "readout of empty node set");
  std::vector<double> out(static_cast<size_t>(h.cols), mode == Readout::Max ? -HUGE_VAL : 0.0);
  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < h.cols; ++c) {
      const double v = h.at(r, c);
      if (mode == Readout::Max)
        out[static_cast<size_t>(c)] = std::max(out[static_cast<size_t>(c)], v);
      else
        out[static_cast<size_t>(c)] += v;
    }
  if (mode == Readout::Mean)
    for (auto& v : out) v /= h.rows;
  return out;
}

ForwardResult forward_batch(Tape& tape, const std::vector<const Matrix*>& features,
                            const std::vector<const NormalizedAdjacency*>& adjs,
                            const Model& model, bool training, Rng* rng,
                            const EdgeMask* mask) {
  const ModelConfig& cfg = model.cfg;
  const int batch = static_cast<int>(features.size());
  if (batch == 0) throw ScanError(Err::EmptyGraph, "empty batch");
  if (mask && batch != 1)
    throw ScanError(Err::ShapeMismatch, "edge-masked forward takes a single graph");
  if (training && !rng) throw ScanError(Err::ConfigError, "training forward needs an rng");

  // disjoint union
  int total = 0;
  std::vector<int> offset(static_cast<size_t>(batch), 0);
  for (int g = 0; g < batch; ++g) {
    if (features[static_cast<size_t>(g)]->cols != cfg.in_dim)
      throw ScanError(Err::ShapeMismatch, "feature width != model input dim");
    offset[static_cast<size_t>(g)] = total;
    total += features[static_cast<size_t>(g)]->rows;
  }
  Matrix x(total, cfg.in_dim);
  std::vector<int> seg(static_cast<size_t>(total), 0);
  std::vector<PropagateEntry> gcn_entries, gin_entries;
  for (int g = 0; g < batch; ++g) {
    const Matrix& f = *features[static_cast<size_t>(g)];
    const int off = offset[static_cast<size_t>(g)];
    for (int r = 0; r < f.rows; ++r) {
      seg[static_cast<size_t>(off + r)] = g;
      for (int c = 0; c < f.cols; ++c) x.at(off + r, c) = f.at(r, c);
    }
    for (const auto& e : adjs[static_cast<size_t>(g)]->gcn_entries)
      gcn_entries.push_back({e.dst + off, e.src + off, e.w});
    for (const auto& e : adjs[static_cast<size_t>(g)]->gin_entries)
      gin_entries.push_back({e.dst + off, e.src + off, e.w});
  }

  ForwardResult out;
  for (Matrix* p : const_cast<Model&>(model).params()) out.param_vars.push_back(tape.leaf(*p));
  size_t pv = 0;  // cursor into param_vars, same order as Model::params()

  Var h = tape.leaf(std::move(x));
  std::vector<Var> layer_h{h};  // layer 0 = raw features

  auto propagate_gcn = [&](Var hh) {
    if (mask) return tape.gcn_propagate_masked(mask->adj->gcn, mask->mask, hh);
    return tape.propagate(total, gcn_entries, hh);
  };
  auto neighbor_sum = [&](Var hh) {
    if (mask) return tape.neighbor_sum_masked(mask->adj->gin_msgs, mask->mask, hh);
    return tape.propagate(total, gin_entries, hh);
  };

  if (cfg.arch == Arch::Gcn) {
    for (int l = 0; l < cfg.layers; ++l) {
      Var w = out.param_vars[pv++];
      h = tape.relu(tape.matmul(propagate_gcn(h), w));
      if (training) h = tape.dropout(h, cfg.dropout, *rng, true);
      layer_h.push_back(h);
    }
  } else {
    for (int l = 0; l < cfg.layers; ++l) {
      Var w1 = out.param_vars[pv++];
      Var b1 = out.param_vars[pv++];
      Var w2 = out.param_vars[pv++];
      Var b2 = out.param_vars[pv++];
      Var pre = tape.add(h, neighbor_sum(h));
      Var z = tape.relu(tape.add_rowvec(tape.matmul(pre, w1), b1));
      h = tape.add_rowvec(tape.matmul(z, w2), b2);
      layer_h.push_back(h);
    }
  }
  out.node_embeddings = tape.val(h);

  // attention top-k pooling: scores from one GCN layer + tanh, applied to the
  // final embeddings; kept rows are score-gated so the scorer gets gradient
  std::vector<int> kept_rows;      // global row ids, ascending
  std::vector<int> seg_kept = seg;
  Var gate_scores;                 // kept x 1
  if (cfg.pooling()) {
    Var pw = out.param_vars[pv++];
    Var scores = tape.tanh(tape.matmul(propagate_gcn(h), pw));
    const Matrix& sv = tape.val(scores);
    out.kept.resize(static_cast<size_t>(batch));
    for (int g = 0; g < batch; ++g) {
      const int off = offset[static_cast<size_t>(g)];
      const int n = features[static_cast<size_t>(g)]->rows;
      auto local = topk_ids(sv.data.data() + off, n, cfg.pool_ratio);
      for (int id : local) {
        out.kept[static_cast<size_t>(g)].push_back(id);
        kept_rows.push_back(off + id);
      }
    }
    seg_kept.clear();
    for (int r : kept_rows) seg_kept.push_back(seg[static_cast<size_t>(r)]);
    if (cfg.pool_gating) gate_scores = tape.gather_rows(scores, kept_rows);
  }

  auto select_rows = [&](Var hh) {
    if (!cfg.pooling()) return hh;
    Var sel = tape.gather_rows(hh, kept_rows);
    if (cfg.pool_gating) sel = tape.row_scale(sel, gate_scores);
    return sel;
  };

  Var h_g;
  if (cfg.arch == Arch::Gcn) {
    Var sel = select_rows(h);
    switch (cfg.readout) {
      case Readout::Sum: h_g = tape.segment_sum(sel, seg_kept, batch); break;
      case Readout::Mean: h_g = tape.segment_mean(sel, seg_kept, batch); break;
      case Readout::Max: h_g = tape.segment_max(sel, seg_kept, batch); break;
    }
  } else {
    std::vector<Var> parts;
    for (Var lh : layer_h) parts.push_back(tape.segment_sum(select_rows(lh), seg_kept, batch));
    h_g = tape.concat_cols(parts);
  }
  out.h_g_var = h_g;
  out.h_g = tape.val(h_g);

  Var w1 = out.param_vars[pv++];
  Var b1 = out.param_vars[pv++];
  Var w2 = out.param_vars[pv++];
  Var b2 = out.param_vars[pv++];
  Var z = tape.relu(tape.add_rowvec(tape.matmul(h_g, w1), b1));
  if (cfg.arch == Arch::Gin && training) z = tape.dropout(z, cfg.dropout, *rng, true);
  Var logits = tape.add_rowvec(tape.matmul(z, w2), b2);
  out.logits_var = logits;

  const Matrix& lv = tape.val(logits);
  for (int g = 0; g < batch; ++g) out.preds.push_back(prediction_from_logits(lv.at(g, 0), lv.at(g, 1)));
  return out;
}

}  // namespace netscan
