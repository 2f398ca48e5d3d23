#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netscan/checkpoint.hpp"
#include "netscan/dataset.hpp"
#include "netscan/forward.hpp"
#include "netscan/metrics.hpp"

namespace netscan {

enum class Optim { Sgd, Adam };
Optim optim_from_string(const std::string& s);
const char* optim_name(Optim o);

struct TrainConfig {
  ModelConfig model;
  int epochs = 100;
  int batch = 4;
  double lr = 0.001;
  Optim optimizer = Optim::Sgd;
  uint64_t seed = 0;
  double val_fraction = 0.10;
  int val_every = 10;

  void validate() const;
};

/// One LOOCV fold: indices into the dataset's sample list.
struct Fold {
  int test_index = -1;
  std::vector<int> train;
  std::vector<int> val;
};

/// Shuffle once with `seed`, then per held-out sample draw a stratified
/// ceil(val_fraction * remaining) validation split with the fold's own RNG
/// stream. train + val + {test} partition the dataset exactly.
std::vector<Fold> split_loocv(const Dataset& ds, uint64_t seed, double val_fraction);

struct History {
  std::vector<double> train_loss;                 // one entry per epoch
  std::vector<std::pair<int, double>> val_loss;   // (epoch, loss) at every val_every
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

struct TrainOutcome {
  Model model;  // parameters at the best-validation checkpoint
  History history;
};

/// Mini-batch gradient descent for `epochs` epochs; validation loss is
/// evaluated every `val_every` epochs and the minimizing snapshot is returned
/// (ties -> earlier epoch). Non-finite loss raises DivergedLoss.
TrainOutcome train_once(const Dataset& ds, const std::vector<int>& train_idx,
                        const std::vector<int>& val_idx, const TrainConfig& cfg,
                        uint64_t fold_seed);

struct FoldResult {
  int sample_index = -1;  // dataset index of the held-out sample
  std::string sample_path;
  int truth = 0;
  Prediction pred;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

struct LoocvOutcome {
  std::vector<FoldResult> folds;
  MetricsReport metrics;
};

/// Full leave-one-out protocol; folds run on up to `threads` workers with
/// per-fold RNG streams, so results are independent of scheduling.
LoocvOutcome run_loocv(const Dataset& ds, const TrainConfig& cfg, int threads = 1);

/// "sample,truth,prediction,prob_malicious,best_epoch" rows.
std::string folds_csv(const LoocvOutcome& out);

struct GridRow {
  TrainConfig config;
  MetricsReport metrics;
};

/// Evaluate each config with LOOCV (or k-fold when `kfold` > 0); rows come
/// back sorted by accuracy, descending.
std::vector<GridRow> grid_search(const Dataset& ds, const std::vector<TrainConfig>& grid,
                                 int threads = 1, int kfold = 0);
std::string grid_csv(const std::vector<GridRow>& rows);

/// Mean inference cross-entropy of the model over the given samples.
double evaluate_loss(const Dataset& ds, const std::vector<int>& idx, const Model& model,
                     const std::vector<NormalizedAdjacency>& adj_cache);

}  // namespace netscan
