#include "netscan/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "netscan/errors.hpp"

namespace netscan {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["data"] = m.data;
  return j;
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& d = j.at("data");
  if (d.size() != m.size()) throw ScanError(Err::ShapeMismatch, "checkpoint matrix size");
  for (size_t i = 0; i < m.size(); ++i) m.data[i] = d[i].get<double>();
  return m;
}

}  // namespace

std::string checkpoint_to_json(const Model& model) {
  json j;
  j["format_version"] = 1;
  j["vocab_version"] = kVocabVersion;
  j["seed"] = model.init_seed;
  json& c = j["config"];
  c["arch"] = arch_name(model.cfg.arch);
  c["layers"] = model.cfg.layers;
  c["hidden"] = model.cfg.hidden;
  c["dropout"] = model.cfg.dropout;
  c["readout"] = readout_name(model.cfg.readout);
  c["pool_ratio"] = model.cfg.pool_ratio;
  c["pool_gating"] = model.cfg.pool_gating;
  c["edge_dir"] = edge_dir_name(model.cfg.edge_dir);
  c["head_hidden"] = model.cfg.head_hidden;
  c["in_dim"] = model.cfg.in_dim;

  json& w = j["weights"];
  w["gcn"] = json::array();
  for (const auto& g : model.gcn_w) w["gcn"].push_back(matrix_to_json(g));
  w["gin"] = json::array();
  for (const auto& mlp : model.gin_mlp) {
    json layer;
    layer["w1"] = matrix_to_json(mlp.l1.w);
    layer["b1"] = matrix_to_json(mlp.l1.b);
    layer["w2"] = matrix_to_json(mlp.l2.w);
    layer["b2"] = matrix_to_json(mlp.l2.b);
    w["gin"].push_back(std::move(layer));
  }
  if (model.cfg.pooling()) w["pool"] = matrix_to_json(model.pool_w);
  w["head1_w"] = matrix_to_json(model.head1.w);
  w["head1_b"] = matrix_to_json(model.head1.b);
  w["head2_w"] = matrix_to_json(model.head2.w);
  w["head2_b"] = matrix_to_json(model.head2.b);
  return j.dump();
}

Model checkpoint_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format_version", -1) != 1)
    throw ScanError(Err::ConfigError, "unsupported checkpoint format version");
  if (j.value("vocab_version", -1) != kVocabVersion)
    throw ScanError(Err::UnknownKind, "checkpoint vocabulary version mismatch (want " +
                                          std::to_string(kVocabVersion) + ")");
  const json& c = j.at("config");
  ModelConfig cfg;
  cfg.arch = arch_from_string(c.at("arch").get<std::string>());
  cfg.layers = c.at("layers").get<int>();
  cfg.hidden = c.at("hidden").get<int>();
  cfg.dropout = c.at("dropout").get<double>();
  cfg.readout = readout_from_string(c.at("readout").get<std::string>());
  cfg.pool_ratio = c.at("pool_ratio").get<double>();
  cfg.pool_gating = c.at("pool_gating").get<bool>();
  cfg.edge_dir = edge_dir_from_string(c.at("edge_dir").get<std::string>());
  cfg.head_hidden = c.at("head_hidden").get<int>();
  cfg.in_dim = c.at("in_dim").get<int>();
  cfg.validate();

  Model m;
  m.cfg = cfg;
  m.init_seed = j.at("seed").get<uint64_t>();
  const json& w = j.at("weights");
  for (const auto& g : w.at("gcn")) m.gcn_w.push_back(matrix_from_json(g));
  for (const auto& layer : w.at("gin")) {
    GinMlp mlp;
    mlp.l1.w = matrix_from_json(layer.at("w1"));
    mlp.l1.b = matrix_from_json(layer.at("b1"));
    mlp.l2.w = matrix_from_json(layer.at("w2"));
    mlp.l2.b = matrix_from_json(layer.at("b2"));
    m.gin_mlp.push_back(std::move(mlp));
  }
  if (cfg.pooling()) m.pool_w = matrix_from_json(w.at("pool"));
  m.head1.w = matrix_from_json(w.at("head1_w"));
  m.head1.b = matrix_from_json(w.at("head1_b"));
  m.head2.w = matrix_from_json(w.at("head2_w"));
  m.head2.b = matrix_from_json(w.at("head2_b"));
  return m;
}

void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScanError(Err::IoError, "cannot write " + path);
  out << checkpoint_to_json(model);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScanError(Err::MissingFile, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace netscan
