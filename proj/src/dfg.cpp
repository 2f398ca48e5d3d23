#include "netscan/dfg.hpp"

#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "netscan/parser.hpp"

namespace netscan {

Matrix Dfg::adjacency() const {
  Matrix a(node_count(), node_count());
  for (const auto& [u, v] : edges) a.at(u, v) = 1.0;
  return a;
}

std::vector<std::vector<int>> Dfg::out_neighbors() const {
  std::vector<std::vector<int>> out(static_cast<size_t>(node_count()));
  for (const auto& [u, v] : edges) out[static_cast<size_t>(u)].push_back(v);
  return out;
}

std::vector<std::vector<int>> Dfg::in_neighbors() const {
  std::vector<std::vector<int>> in(static_cast<size_t>(node_count()));
  for (const auto& [u, v] : edges) in[static_cast<size_t>(v)].push_back(u);
  return in;
}

void Dfg::validate() const {
  const int n = node_count();
  for (int i = 0; i < n; ++i)
    if (nodes[static_cast<size_t>(i)].id != i)
      throw ScanError(Err::GeneratorError, "node ids must be dense from 0");
  std::unordered_set<int64_t> seen;
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw ScanError(Err::GeneratorError, "edge endpoint out of range");
    if (!seen.insert(static_cast<int64_t>(u) * n + v).second)
      throw ScanError(Err::GeneratorError, "duplicate edge");
  }
}

std::string Dfg::to_json() const {
  nlohmann::json j;
  j["meta"]["vocab_version"] = kVocabVersion;
  auto& jn = j["nodes"] = nlohmann::json::array();
  for (const auto& node : nodes) {
    nlohmann::json e;
    e["id"] = node.id;
    e["kind"] = std::string(kind_name(node.kind));
    e["name"] = node.name;
    jn.push_back(std::move(e));
  }
  auto& je = j["edges"] = nlohmann::json::array();
  for (const auto& [u, v] : edges) je.push_back(nlohmann::json::array({u, v}));
  return j.dump();  // nlohmann objects are key-sorted
}

Dfg Dfg::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("meta") || j["meta"].value("vocab_version", -1) != kVocabVersion)
    throw ScanError(Err::UnknownKind,
                    "vocabulary version mismatch (want " + std::to_string(kVocabVersion) + ")");
  Dfg g;
  for (const auto& e : j.at("nodes")) {
    DfgNode n;
    n.id = e.at("id").get<int>();
    n.kind = kind_from_name(e.at("kind").get<std::string>());
    n.name = e.at("name").get<std::string>();
    g.nodes.push_back(std::move(n));
  }
  for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  g.validate();
  return g;
}

namespace {

class DfgBuilder {
 public:
  explicit DfgBuilder(const ElaboratedDesign& design) : design_(design) {}

  Dfg build() {
    for (const auto& s : design_.signals) {
      NodeKind kind = NodeKind::Terminal;
      switch (s.role) {
        case SignalInfo::Role::Input: kind = NodeKind::Input; break;
        case SignalInfo::Role::Output: kind = NodeKind::Output; break;
        case SignalInfo::Role::Inout: kind = NodeKind::Inout; break;
        case SignalInfo::Role::Internal: kind = NodeKind::Terminal; break;
      }
      terminal_[s.name] = add_node(kind, s.name);
    }

    for (const auto& op : design_.ops) {
      const int target = terminal_.at(op.target);
      switch (op.kind) {
        case ElabOp::Kind::Assign: {
          add_edge(expr_node(*op.rhs, op.target), target);
          break;
        }
        case ElabOp::Kind::Gate: {
          const int g = add_op_node(op.gate, op.target);
          for (const auto& in : op.inputs) add_edge(expr_node(*in, op.target), g);
          add_edge(g, target);
          break;
        }
        case ElabOp::Kind::Dff: {
          const int dff = add_op_node(NodeKind::Dff, op.target);
          int data = expr_node(*op.rhs, op.target);
          if (op.guard) {
            const int br = add_op_node(NodeKind::Branch, op.target);
            add_edge(expr_node(*op.guard, op.target), br);
            add_edge(data, br);
            data = br;
          }
          add_edge(data, dff);
          add_edge(terminal_.at(op.clock), dff);
          add_edge(dff, target);
          break;
        }
        case ElabOp::Kind::Latch: {
          const int latch = add_op_node(NodeKind::Latch, op.target);
          add_edge(expr_node(*op.guard, op.target), latch);
          add_edge(expr_node(*op.rhs, op.target), latch);
          add_edge(latch, target);
          break;
        }
      }
    }

    dfg_.validate();
    return std::move(dfg_);
  }

 private:
  int add_node(NodeKind kind, std::string name) {
    DfgNode n;
    n.id = dfg_.node_count();
    n.kind = kind;
    n.name = std::move(name);
    dfg_.nodes.push_back(std::move(n));
    return dfg_.nodes.back().id;
  }

  // Operator nodes are named after the signal they help drive plus a
  // per-target counter, e.g. "top.y:Cond:0"; keeps reports human-readable.
  int add_op_node(NodeKind kind, const std::string& target) {
    const int k = op_counter_[target]++;
    return add_node(kind, target + ":" + std::string(kind_name(kind)) + ":" + std::to_string(k));
  }

  void add_edge(int u, int v) {
    const int64_t key = static_cast<int64_t>(u) * (1LL << 31) + v;
    if (edge_set_.insert(key).second) dfg_.edges.emplace_back(u, v);
  }

  int expr_node(const Expr& e, const std::string& target) {
    switch (e.kind) {
      case Expr::Kind::Ident:
        return terminal_.at(e.name);
      case Expr::Kind::Number: {
        const std::string label =
            e.sized ? std::to_string(e.width) + "'d" + std::to_string(e.value)
                    : std::to_string(e.value);
        return add_node(NodeKind::Constant, label);
      }
      case Expr::Kind::Op: {
        const int node = add_op_node(e.op, target);
        for (const auto& a : e.args) add_edge(expr_node(*a, target), node);
        return node;
      }
    }
    throw ScanError(Err::GeneratorError, "unreachable expression kind");
  }

  const ElaboratedDesign& design_;
  Dfg dfg_;
  std::unordered_map<std::string, int> terminal_;
  std::unordered_map<std::string, int> op_counter_;
  std::unordered_set<int64_t> edge_set_;
};

}  // namespace

Dfg build_dfg(const ElaboratedDesign& design) { return DfgBuilder(design).build(); }

Dfg dfg_from_text(std::string_view text, const std::string& top) {
  NetlistAst ast = parse_text(text);
  return build_dfg(elaborate(ast, top.empty() ? find_top(ast) : top));
}

Dfg dfg_from_file(const std::string& path, const std::string& top) {
  NetlistAst ast = parse_file(path);
  return build_dfg(elaborate(ast, top.empty() ? find_top(ast) : top));
}

}  // namespace netscan
