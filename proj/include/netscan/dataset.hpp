#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netscan/dfg.hpp"

namespace netscan {

/// One-hot node-kind features, N x 37; every row sums to exactly 1.
Matrix encode_features(const Dfg& dfg);

struct Sample {
  Dfg graph;
  Matrix features;  // graph.node_count() x kNodeKindCount
  int label = 0;    // 0 benign, 1 malicious
  std::string family;
  std::string source_path;  // DFG json path as listed in the manifest
};

struct Dataset {
  std::vector<Sample> samples;
  std::string checksum;  // sha256 of the manifest records

  int size() const { return static_cast<int>(samples.size()); }
  int count_label(int label) const;
};

/// Manifest format: header "#count=<n>,sha256=<hex>" then one record
/// "path,label,family" per line; paths are relative to the manifest file.
Dataset load_dataset(const std::string& manifest_path);
void save_dataset(const Dataset& ds, const std::string& manifest_path);

/// Record lines -> checksum, shared by writer and verifier.
std::string manifest_checksum(const std::vector<std::string>& record_lines);

/// Path helpers for the per-sample file family
/// ("x.json" -> "x.v" / "x.truth.json").
std::string netlist_path_for(const std::string& dfg_json_path);
std::string truth_path_for(const std::string& dfg_json_path);

}  // namespace netscan
