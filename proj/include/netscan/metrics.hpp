#pragma once

#include <string>
#include <vector>

namespace netscan {

struct Confusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

/// Standard counts with malicious (1) as the positive class.
Confusion confusion(const std::vector<int>& predictions, const std::vector<int>& truths);

struct FamilyRow {
  std::string family;
  int label = 0;  // ground-truth class of the family
  int total = 0;
  int correct = 0;
};

struct MetricsReport {
  Confusion counts;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_div0 = false;  // TP+FP = 0, precision pinned to 0
  bool recall_div0 = false;     // TP+FN = 0
  std::vector<FamilyRow> per_family;

  std::string to_json() const;
  std::string to_csv() const;
};

/// Accuracy / precision / recall / F1 with pinned divide-by-zero limits
/// (0, flagged). F1 = 0 when precision + recall = 0.
MetricsReport summarize(long tp, long fp, long tn, long fn);

/// summarize() plus the per-family breakdown table.
MetricsReport summarize_with_families(const std::vector<int>& predictions,
                                      const std::vector<int>& truths,
                                      const std::vector<std::string>& families);

}  // namespace netscan
