#include "netscan/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "netscan/sha256.hpp"

namespace fs = std::filesystem;

namespace netscan {

Matrix encode_features(const Dfg& dfg) {
  Matrix x(dfg.node_count(), kNodeKindCount);
  for (const auto& n : dfg.nodes) x.at(n.id, kind_index(n.kind)) = 1.0;
  return x;
}

int Dataset::count_label(int label) const {
  int n = 0;
  for (const auto& s : samples)
    if (s.label == label) ++n;
  return n;
}

std::string manifest_checksum(const std::vector<std::string>& record_lines) {
  std::string body;
  for (const auto& l : record_lines) {
    body += l;
    body += '\n';
  }
  return sha256_hex(body);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScanError(Err::MissingFile, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ScanError(Err::MissingFile, manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();

  std::string header;
  if (!std::getline(in, header))
    throw ScanError(Err::ChecksumMismatch, "empty manifest: " + manifest_path);
  size_t count = 0;
  std::string declared_sum;
  if (header.rfind("#count=", 0) != 0)
    throw ScanError(Err::ChecksumMismatch, "manifest header missing '#count=': " + manifest_path);
  {
    const size_t comma = header.find(",sha256=");
    if (comma == std::string::npos)
      throw ScanError(Err::ChecksumMismatch, "manifest header missing ',sha256=': " + manifest_path);
    count = static_cast<size_t>(std::stoull(header.substr(7, comma - 7)));
    declared_sum = header.substr(comma + 8);
  }

  std::vector<std::string> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(line);
  }
  if (records.size() != count)
    throw ScanError(Err::ChecksumMismatch,
                    "manifest declares " + std::to_string(count) + " records, found " +
                        std::to_string(records.size()));
  const std::string actual = manifest_checksum(records);
  if (actual != declared_sum)
    throw ScanError(Err::ChecksumMismatch, "manifest checksum " + actual + " != " + declared_sum);

  Dataset ds;
  ds.checksum = actual;
  std::unordered_set<std::string> seen;
  for (const auto& rec : records) {
    auto fields = split_csv(rec);
    if (fields.size() != 3)
      throw ScanError(Err::LabelMissing, "manifest record needs path,label,family: " + rec);
    Sample s;
    s.source_path = fields[0];
    if (fields[1] != "0" && fields[1] != "1")
      throw ScanError(Err::LabelMissing, "label must be 0 or 1 in: " + rec);
    s.label = fields[1] == "1" ? 1 : 0;
    s.family = fields[2];
    if (!seen.insert(s.source_path).second)
      throw ScanError(Err::DuplicateDeclaration, "duplicate sample path: " + s.source_path);
    const std::string full = (base / s.source_path).string();
    s.graph = Dfg::from_json(read_file(full));
    s.features = encode_features(s.graph);
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty())
    std::cerr << "warning: manifest " << manifest_path << " lists no samples\n";
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& manifest_path) {
  const fs::path base = fs::path(manifest_path).parent_path();
  if (!base.empty()) fs::create_directories(base);

  std::vector<std::string> records;
  for (const auto& s : ds.samples) {
    const std::string full = (base / s.source_path).string();
    const fs::path dir = fs::path(full).parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    std::ofstream out(full, std::ios::binary);
    if (!out) throw ScanError(Err::IoError, "cannot write " + full);
    out << s.graph.to_json();
    records.push_back(s.source_path + "," + std::to_string(s.label) + "," + s.family);
  }
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw ScanError(Err::IoError, "cannot write " + manifest_path);
  out << "#count=" << records.size() << ",sha256=" << manifest_checksum(records) << "\n";
  for (const auto& r : records) out << r << "\n";
}

std::string netlist_path_for(const std::string& dfg_json_path) {
  const std::string suffix = ".json";
  if (dfg_json_path.size() > suffix.size() &&
      dfg_json_path.compare(dfg_json_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return dfg_json_path.substr(0, dfg_json_path.size() - suffix.size()) + ".v";
  return dfg_json_path + ".v";
}

std::string truth_path_for(const std::string& dfg_json_path) {
  const std::string suffix = ".json";
  if (dfg_json_path.size() > suffix.size() &&
      dfg_json_path.compare(dfg_json_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return dfg_json_path.substr(0, dfg_json_path.size() - suffix.size()) + ".truth.json";
  return dfg_json_path + ".truth.json";
}

}  // namespace netscan
