#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netscan/dataset.hpp"
#include "netscan/rng.hpp"

namespace netscan {

/// Per-family sample counts and size knobs for the synthetic corpus. The
/// defaults mirror the evaluation dataset mix: 68 malicious across five
/// attack families, 47 benign across six circuit families.
struct CorpusSpec {
  uint64_t seed = 1;

  int mux_ro = 21;
  int latch_ro = 9;
  int aes_like = 8;
  int des_like = 14;
  int sha_like = 9;
  int hidden = 7;

  int adder_tree = 9;
  int multiplier = 8;
  int lfsr = 7;
  int counter = 7;
  int spn_round = 8;
  int mux_tree = 8;

  double size_scale = 1.0;  // stretches replication/width draws

  int total() const;
  int total_malicious() const;

  std::string to_json() const;
  static CorpusSpec from_json(const std::string& text);
  static CorpusSpec from_file(const std::string& path);
};

struct GeneratedSample {
  std::string stem;     // file stem, e.g. "mux_ro_003"
  std::string verilog;  // netlist text in the accepted subset
  int label = 0;
  std::string family;
  /// Flat signal names whose terminals and driving operator nodes form the
  /// malicious ground truth; empty iff benign.
  std::vector<std::string> truth_signals;
};

// Attack generators. `instances`/`rounds` control replication and must be
// positive (a replication count of zero would produce a benign circuit).
GeneratedSample gen_mux_ro(int instances, uint64_t seed);
GeneratedSample gen_latch_ro(int instances, uint64_t seed);
GeneratedSample gen_sequential_attack(const std::string& family, int rounds, uint64_t seed);
GeneratedSample gen_hidden(const std::string& benign_family, const std::string& attack_family,
                           uint64_t seed);
GeneratedSample gen_benign(const std::string& family, int size, uint64_t seed);

struct CorpusManifest {
  std::string manifest_path;
  int total = 0;
  int malicious = 0;
  int benign = 0;
  std::string checksum;
};

/// Generate netlists, their DFG JSONs, per-sample truth files, and the
/// manifest. Any parse failure of generated text is a generator bug and
/// aborts. Deterministic under the spec seed.
CorpusManifest build_corpus(const CorpusSpec& spec, const std::string& out_dir);

/// Ground truth as stored in "<stem>.truth.json".
struct TruthInfo {
  std::vector<std::string> signals;
  std::vector<int> node_ids;
  std::vector<std::pair<int, int>> edges;  // induced on the truth node set
};
TruthInfo load_truth(const std::string& path);

}  // namespace netscan
