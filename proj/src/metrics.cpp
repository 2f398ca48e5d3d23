#include "netscan/metrics.hpp"

#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "netscan/errors.hpp"

namespace netscan {

Confusion confusion(const std::vector<int>& predictions, const std::vector<int>& truths) {
  if (predictions.size() != truths.size())
    throw ScanError(Err::LengthMismatch, "confusion: predictions vs truths");
  if (predictions.empty()) std::cerr << "warning: confusion over zero samples\n";
  Confusion c;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool truth = truths[i] == 1;
    if (pred && truth)
      ++c.tp;
    else if (pred && !truth)
      ++c.fp;
    else if (!pred && truth)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

MetricsReport summarize(long tp, long fp, long tn, long fn) {
  if (tp < 0 || fp < 0 || tn < 0 || fn < 0)
    throw ScanError(Err::ConfigError, "negative confusion counts");
  MetricsReport r;
  r.counts = {tp, fp, tn, fn};
  const long total = r.counts.total();
  r.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  if (tp + fp > 0) {
    r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  } else {
    r.precision_div0 = true;
  }
  if (tp + fn > 0) {
    r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    r.recall_div0 = true;
  }
  if (r.precision + r.recall > 0.0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MetricsReport summarize_with_families(const std::vector<int>& predictions,
                                      const std::vector<int>& truths,
                                      const std::vector<std::string>& families) {
  if (families.size() != predictions.size())
    throw ScanError(Err::LengthMismatch, "summarize_with_families: families length");
  Confusion c = confusion(predictions, truths);
  MetricsReport r = summarize(c.tp, c.fp, c.tn, c.fn);
  std::map<std::string, FamilyRow> rows;
  for (size_t i = 0; i < predictions.size(); ++i) {
    FamilyRow& row = rows[families[i]];
    row.family = families[i];
    row.label = truths[i];
    row.total += 1;
    if (predictions[i] == truths[i]) row.correct += 1;
  }
  for (auto& [k, v] : rows) r.per_family.push_back(v);
  return r;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["counts"] = {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
  j["metrics"] = {{"accuracy", accuracy},
                  {"precision", precision},
                  {"recall", recall},
                  {"f1", f1}};
  j["flags"] = nlohmann::json::array();
  if (precision_div0) j["flags"].push_back("precision_divide_by_zero");
  if (recall_div0) j["flags"].push_back("recall_divide_by_zero");
  j["per_family"] = nlohmann::json::array();
  for (const auto& row : per_family) {
    j["per_family"].push_back({{"family", row.family},
                               {"label", row.label},
                               {"total", row.total},
                               {"correct", row.correct}});
  }
  return j.dump(2);
}

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  out << "metric,value\n";
  out << "tp," << counts.tp << "\nfp," << counts.fp << "\ntn," << counts.tn << "\nfn," << counts.fn
      << "\n";
  out << "accuracy," << accuracy << "\nprecision," << precision << "\nrecall," << recall << "\nf1,"
      << f1 << "\n";
  for (const auto& row : per_family)
    out << "family:" << row.family << "," << row.correct << "/" << row.total << "\n";
  return out.str();
}

}  // namespace netscan
