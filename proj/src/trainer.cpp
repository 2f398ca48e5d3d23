#include "netscan/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <sstream>
#include <thread>

namespace netscan {

Optim optim_from_string(const std::string& s) {
  if (s == "sgd") return Optim::Sgd;
  if (s == "adam") return Optim::Adam;
  throw ScanError(Err::ConfigError, "optimizer must be sgd|adam, got '" + s + "'");
}

const char* optim_name(Optim o) { return o == Optim::Sgd ? "sgd" : "adam"; }

void TrainConfig::validate() const {
  model.validate();
  if (epochs < 1) throw ScanError(Err::ConfigError, "epochs must be >= 1");
  if (val_every < 1) throw ScanError(Err::ConfigError, "val-every must be >= 1");
  if (epochs < val_every)
    throw ScanError(Err::ConfigError, "epochs must be >= val-every so a checkpoint exists");
  if (batch < 1) throw ScanError(Err::ConfigError, "batch must be >= 1");
  if (lr < 0.0) throw ScanError(Err::ConfigError, "lr must be >= 0");
  if (val_fraction <= 0.0 || val_fraction >= 1.0)
    throw ScanError(Err::ConfigError, "val-fraction must be in (0,1)");
}

namespace {

// Stratified draw of ceil(vf * remaining) validation members; keeps at least
// one training sample per class whenever the class counts allow it.
void draw_validation(const Dataset& ds, const std::vector<int>& remaining, double vf, Rng& rng,
                     std::vector<int>& train, std::vector<int>& val) {
  const int want = static_cast<int>(std::ceil(vf * static_cast<double>(remaining.size())));
  std::vector<int> by_class[2];
  for (int idx : remaining) by_class[ds.samples[static_cast<size_t>(idx)].label].push_back(idx);

  const int n0 = static_cast<int>(by_class[0].size());
  const int n1 = static_cast<int>(by_class[1].size());
  // proportional split of the validation quota, clamped so each class keeps
  // a training sample when it can
  int v1 = static_cast<int>(std::lround(
      static_cast<double>(want) * static_cast<double>(n1) / static_cast<double>(n0 + n1)));
  v1 = std::min(v1, std::max(0, n1 - 1));
  int v0 = std::min(want - v1, std::max(0, n0 - 1));
  v1 = std::min(want - v0, std::max(0, n1 - 1));  // rebalance if v0 got clamped

  train.clear();
  val.clear();
  for (int c = 0; c < 2; ++c) {
    auto members = by_class[c];
    rng.shuffle(members);
    const int take = c == 0 ? v0 : v1;
    for (size_t i = 0; i < members.size(); ++i)
      (static_cast<int>(i) < take ? val : train).push_back(members[i]);
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
}

bool single_class(const Dataset& ds, const std::vector<int>& idx) {
  if (idx.empty()) return true;
  const int first = ds.samples[static_cast<size_t>(idx[0])].label;
  for (int i : idx)
    if (ds.samples[static_cast<size_t>(i)].label != first) return false;
  return true;
}

class Optimizer {
 public:
  Optimizer(Optim kind, double lr, const std::vector<Matrix*>& params) : kind_(kind), lr_(lr) {
    if (kind_ == Optim::Adam) {
      for (const Matrix* p : params) {
        m_.emplace_back(p->rows, p->cols);
        v_.emplace_back(p->rows, p->cols);
      }
    }
  }

  void step(std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
    if (kind_ == Optim::Sgd) {
      for (size_t i = 0; i < params.size(); ++i)
        for (size_t k = 0; k < params[i]->size(); ++k)
          params[i]->data[k] -= lr_ * grads[i]->data[k];
      return;
    }
    ++t_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(b1, t_);
    const double bc2 = 1.0 - std::pow(b2, t_);
    for (size_t i = 0; i < params.size(); ++i) {
      for (size_t k = 0; k < params[i]->size(); ++k) {
        const double g = grads[i]->data[k];
        double& m = m_[i].data[k];
        double& v = v_[i].data[k];
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        params[i]->data[k] -= lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps);
      }
    }
  }

 private:
  Optim kind_;
  double lr_;
  int t_ = 0;
  std::vector<Matrix> m_, v_;
};

std::vector<NormalizedAdjacency> build_adjacency_cache(const Dataset& ds, EdgeDir dir) {
  std::vector<NormalizedAdjacency> cache;
  cache.reserve(ds.samples.size());
  for (const auto& s : ds.samples) cache.push_back(normalize_adjacency(s.graph, dir));
  return cache;
}

}  // namespace

std::vector<Fold> split_loocv(const Dataset& ds, uint64_t seed, double val_fraction) {
  if (ds.size() < 3) throw ScanError(Err::TooFewSamples, "LOOCV needs at least 3 samples");
  if (ds.count_label(0) == 0 || ds.count_label(1) == 0)
    throw ScanError(Err::TooFewSamples, "LOOCV needs both classes present");

  Rng master(seed);
  std::vector<int> order(static_cast<size_t>(ds.size()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  master.shuffle(order);  // the one dataset shuffle

  std::vector<Fold> folds;
  for (size_t pos = 0; pos < order.size(); ++pos) {
    Fold f;
    f.test_index = order[pos];
    std::vector<int> remaining;
    for (size_t j = 0; j < order.size(); ++j)
      if (j != pos) remaining.push_back(order[j]);

    Rng fold_rng = master.split(0x5000 + pos);
    draw_validation(ds, remaining, val_fraction, fold_rng, f.train, f.val);
    if (single_class(ds, f.train) && !single_class(ds, remaining) && f.train.size() >= 2) {
      // one re-draw with a fresh stream, then give up
      Rng retry = master.split(0x9000 + pos);
      draw_validation(ds, remaining, val_fraction, retry, f.train, f.val);
      if (single_class(ds, f.train))
        throw ScanError(Err::SingleClassTrainSet,
                        "fold " + std::to_string(pos) + " cannot form a two-class train set");
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

double evaluate_loss(const Dataset& ds, const std::vector<int>& idx, const Model& model,
                     const std::vector<NormalizedAdjacency>& adj_cache) {
  double total = 0.0;
  for (int i : idx) {
    const Sample& s = ds.samples[static_cast<size_t>(i)];
    Tape tape;
    ForwardResult fr =
        forward_batch(tape, {&s.features}, {&adj_cache[static_cast<size_t>(i)]}, model, false, nullptr);
    total += cross_entropy(fr.preds[0].probs, s.label);
  }
  return idx.empty() ? 0.0 : total / static_cast<double>(idx.size());
}

namespace {

TrainOutcome train_once_cached(const Dataset& ds, const std::vector<int>& train_idx,
                               const std::vector<int>& val_idx, const TrainConfig& cfg,
                               uint64_t fold_seed,
                               const std::vector<NormalizedAdjacency>& adj_cache) {
  cfg.validate();
  if (train_idx.empty() || val_idx.empty())
    throw ScanError(Err::TooFewSamples, "train_once needs nonempty train and val sets");

  Rng fold_rng(fold_seed);
  Model model = Model::init(cfg.model, fold_rng.split(1).seed());
  Rng run_rng = fold_rng.split(2);  // drives epoch shuffles and dropout masks

  auto params = model.params();
  Optimizer opt(cfg.optimizer, cfg.lr, params);

  TrainOutcome out{Model::init(cfg.model, model.init_seed), {}};
  out.history.best_val_loss = HUGE_VAL;

  std::vector<int> order = train_idx;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    run_rng.shuffle(order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch)) {
      std::vector<const Matrix*> feats;
      std::vector<const NormalizedAdjacency*> adjs;
      std::vector<int> labels;
      for (size_t k = start; k < std::min(order.size(), start + static_cast<size_t>(cfg.batch)); ++k) {
        const int i = order[k];
        feats.push_back(&ds.samples[static_cast<size_t>(i)].features);
        adjs.push_back(&adj_cache[static_cast<size_t>(i)]);
        labels.push_back(ds.samples[static_cast<size_t>(i)].label);
      }
      Tape tape;
      ForwardResult fr = forward_batch(tape, feats, adjs, model, true, &run_rng);
      Var loss = tape.mean_nll(fr.logits_var, labels);
      const double loss_v = tape.val(loss).at(0, 0);
      if (!std::isfinite(loss_v))
        throw ScanError(Err::DivergedLoss, "epoch " + std::to_string(epoch) + " batch " +
                                               std::to_string(batches) + ": loss " +
                                               std::to_string(loss_v));
      epoch_loss += loss_v;
      ++batches;
      if (cfg.lr > 0.0) {
        tape.backward(loss);
        std::vector<const Matrix*> grads;
        grads.reserve(fr.param_vars.size());
        for (Var v : fr.param_vars) grads.push_back(&tape.grad(v));
        opt.step(params, grads);
      }
    }
    out.history.train_loss.push_back(batches ? epoch_loss / batches : 0.0);

    if (epoch % cfg.val_every == 0) {
      const double vl = evaluate_loss(ds, val_idx, model, adj_cache);
      if (!std::isfinite(vl))
        throw ScanError(Err::DivergedLoss, "validation loss diverged at epoch " + std::to_string(epoch));
      out.history.val_loss.emplace_back(epoch, vl);
      if (vl < out.history.best_val_loss) {  // strict: ties keep the earlier epoch
        out.history.best_val_loss = vl;
        out.history.best_epoch = epoch;
        auto src = model.params();
        auto dst = out.model.params();
        for (size_t i = 0; i < src.size(); ++i) *dst[i] = *src[i];
      }
    }
  }
  return out;
}

}  // namespace

TrainOutcome train_once(const Dataset& ds, const std::vector<int>& train_idx,
                        const std::vector<int>& val_idx, const TrainConfig& cfg,
                        uint64_t fold_seed) {
  auto cache = build_adjacency_cache(ds, cfg.model.edge_dir);
  return train_once_cached(ds, train_idx, val_idx, cfg, fold_seed, cache);
}

LoocvOutcome run_loocv(const Dataset& ds, const TrainConfig& cfg, int threads) {
  cfg.validate();
  auto folds = split_loocv(ds, cfg.seed, cfg.val_fraction);
  auto cache = build_adjacency_cache(ds, cfg.model.edge_dir);

  LoocvOutcome out;
  out.folds.resize(folds.size());
  std::vector<std::string> errors(folds.size());
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const size_t f = next.fetch_add(1);
      if (f >= folds.size()) return;
      try {
        const Fold& fold = folds[f];
        Rng fold_rng = Rng(cfg.seed).split(0x10000 + f);
        TrainOutcome trained =
            train_once_cached(ds, fold.train, fold.val, cfg, fold_rng.seed(), cache);

        const Sample& test = ds.samples[static_cast<size_t>(fold.test_index)];
        Tape tape;
        ForwardResult fr = forward_batch(
            tape, {&test.features}, {&cache[static_cast<size_t>(fold.test_index)]}, trained.model,
            false, nullptr);
        FoldResult& r = out.folds[f];
        r.sample_index = fold.test_index;
        r.sample_path = test.source_path;
        r.truth = test.label;
        r.pred = fr.preds[0];
        r.best_epoch = trained.history.best_epoch;
        r.best_val_loss = trained.history.best_val_loss;
      } catch (const std::exception& e) {
        errors[f] = e.what();
      }
    }
  };

  const int nt = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int failed = 0;
  for (size_t f = 0; f < errors.size(); ++f) {
    if (!errors[f].empty()) {
      ++failed;
      std::cerr << "fold " << f << " failed: " << errors[f] << "\n";
    }
  }
  if (failed > 0)
    throw ScanError(Err::DivergedLoss, std::to_string(failed) + " of " +
                                           std::to_string(folds.size()) + " folds failed");

  std::vector<int> preds, truths;
  std::vector<std::string> families;
  for (const auto& r : out.folds) {
    preds.push_back(r.pred.label);
    truths.push_back(r.truth);
    families.push_back(ds.samples[static_cast<size_t>(r.sample_index)].family);
  }
  out.metrics = summarize_with_families(preds, truths, families);
  return out;
}

std::string folds_csv(const LoocvOutcome& out) {
  std::ostringstream os;
  os << "sample,truth,prediction,prob_malicious,best_epoch\n";
  for (const auto& r : out.folds) {
    std::ostringstream prob;
    prob.precision(17);
    prob << r.pred.probs[1];
    os << r.sample_path << "," << r.truth << "," << r.pred.label << "," << prob.str() << ","
       << r.best_epoch << "\n";
  }
  return os.str();
}

std::vector<GridRow> grid_search(const Dataset& ds, const std::vector<TrainConfig>& grid,
                                 int threads, int kfold) {
  std::vector<GridRow> rows;
  for (const auto& cfg : grid) {
    GridRow row;
    row.config = cfg;
    if (kfold <= 0) {
      row.metrics = run_loocv(ds, cfg, threads).metrics;
    } else {
      // cheaper proxy: k groups, train on k-1 (with a val split for
      // checkpoint selection), test on the held-out group
      Rng master(cfg.seed);
      std::vector<int> order(static_cast<size_t>(ds.size()));
      for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      master.shuffle(order);
      auto cache = build_adjacency_cache(ds, cfg.model.edge_dir);
      std::vector<int> preds, truths;
      std::vector<std::string> families;
      for (int k = 0; k < kfold; ++k) {
        std::vector<int> test_set, rest;
        for (size_t i = 0; i < order.size(); ++i)
          (static_cast<int>(i % static_cast<size_t>(kfold)) == k ? test_set : rest)
              .push_back(order[i]);
        if (test_set.empty() || rest.size() < 2) continue;
        std::vector<int> tr, va;
        Rng fold_rng = master.split(0x700 + k);
        draw_validation(ds, rest, cfg.val_fraction, fold_rng, tr, va);
        if (tr.empty() || va.empty()) continue;
        TrainOutcome trained = train_once_cached(ds, tr, va, cfg, fold_rng.seed(), cache);
        for (int i : test_set) {
          const Sample& s = ds.samples[static_cast<size_t>(i)];
          Tape tape;
          ForwardResult fr = forward_batch(tape, {&s.features}, {&cache[static_cast<size_t>(i)]},
                                           trained.model, false, nullptr);
          preds.push_back(fr.preds[0].label);
          truths.push_back(s.label);
          families.push_back(s.family);
        }
      }
      row.metrics = summarize_with_families(preds, truths, families);
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GridRow& a, const GridRow& b) { return a.metrics.accuracy > b.metrics.accuracy; });
  return rows;
}

std::string grid_csv(const std::vector<GridRow>& rows) {
  std::ostringstream os;
  os << "arch,layers,hidden,dropout,readout,pool_ratio,optimizer,accuracy,precision,recall,f1\n";
  for (const auto& r : rows) {
    os << arch_name(r.config.model.arch) << "," << r.config.model.layers << ","
       << r.config.model.hidden << "," << r.config.model.dropout << ","
       << readout_name(r.config.model.readout) << "," << r.config.model.pool_ratio << ","
       << optim_name(r.config.optimizer) << "," << r.metrics.accuracy << ","
       << r.metrics.precision << "," << r.metrics.recall << "," << r.metrics.f1 << "\n";
  }
  return os.str();
}

}  // namespace netscan
