#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "netscan/comb_loops.hpp"
#include "netscan/dfg.hpp"
#include "netscan/iso.hpp"
#include "netscan/lexer.hpp"
#include "netscan/parser.hpp"
#include "netscan/rng.hpp"
#include "netscan/verilog_emit.hpp"

using namespace netscan;

namespace {

Err code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ScanError& e) {
    return e.code();
  }
  throw std::runtime_error("expected a ScanError");
}

// Counts expression nodes that become DFG operator/constant nodes: one per
// operator occurrence and one per literal occurrence (signal refs map to the
// shared terminals). Independent of the builder's traversal.
int count_expr_nodes(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ident: return 0;
    case Expr::Kind::Number: return 1;
    case Expr::Kind::Op: {
      int n = 1;
      for (const auto& a : e.args) n += count_expr_nodes(*a);
      return n;
    }
  }
  return 0;
}

int count_op_nodes(const ElaboratedDesign& d) {
  int n = 0;
  for (const auto& op : d.ops) {
    switch (op.kind) {
      case ElabOp::Kind::Assign:
        n += count_expr_nodes(*op.rhs);
        break;
      case ElabOp::Kind::Gate:
        n += 1;
        for (const auto& in : op.inputs) n += count_expr_nodes(*in);
        break;
      case ElabOp::Kind::Dff:
        n += 1 + count_expr_nodes(*op.rhs);
        if (op.guard) n += 1 + count_expr_nodes(*op.guard);  // Branch node
        break;
      case ElabOp::Kind::Latch:
        n += 1 + count_expr_nodes(*op.rhs) + count_expr_nodes(*op.guard);
        break;
    }
  }
  return n;
}

int out_degree(const Dfg& g, int node) {
  int d = 0;
  for (const auto& [u, v] : g.edges)
    if (u == node) ++d;
  return d;
}

int find_node(const Dfg& g, const std::string& name) {
  for (const auto& n : g.nodes)
    if (n.name == name) return n.id;
  return -1;
}

std::multiset<NodeKind> kind_multiset(const Dfg& g) {
  std::multiset<NodeKind> ks;
  for (const auto& n : g.nodes) ks.insert(n.kind);
  return ks;
}

}  // namespace

TEST_CASE("tokenize: statement, empty input, ranged declaration") {
  auto ts = tokenize("assign y = ~a;");
  REQUIRE(ts.size() == 6);
  CHECK(ts[0].type == Tok::KwAssign);
  CHECK(ts[1].type == Tok::Ident);
  CHECK(ts[1].text == "y");
  CHECK(ts[2].type == Tok::Eq);
  CHECK(ts[3].type == Tok::TildeOp);
  CHECK(ts[4].type == Tok::Ident);
  CHECK(ts[4].text == "a");
  CHECK(ts[5].type == Tok::Semi);

  CHECK(tokenize("").empty());

  auto tb = tokenize("wire [7:0] bus;");
  REQUIRE(tb.size() == 8);
  CHECK(tb[0].type == Tok::KwWire);
  CHECK(tb[1].type == Tok::LBrack);
  CHECK(tb[2].type == Tok::Num);
  CHECK(tb[2].value == 7);
  CHECK(tb[3].type == Tok::Colon);
  CHECK(tb[4].type == Tok::Num);
  CHECK(tb[4].value == 0);
  CHECK(tb[5].type == Tok::RBrack);
  CHECK(tb[6].type == Tok::Ident);
  CHECK(tb[6].text == "bus");
  CHECK(tb[7].type == Tok::Semi);
}

TEST_CASE("tokenize: positions, comments, based literals, illegal bytes") {
  auto ts = tokenize("// comment\nassign /* x */ y = 8'hFF;");
  CHECK(ts[0].type == Tok::KwAssign);
  CHECK(ts[0].pos.line == 2);
  CHECK(ts[0].pos.col == 1);
  auto& num = ts[3];
  CHECK(num.type == Tok::Num);
  CHECK(num.value == 255);
  CHECK(num.width == 8);
  CHECK(num.sized);

  CHECK(tokenize("4'b10_10")[0].value == 10);

  try {
    tokenize("wire \" x;");
    FAIL("expected IllegalCharacter");
  } catch (const ScanError& e) {
    CHECK(e.code() == Err::IllegalCharacter);
    CHECK(e.pos().line == 1);
    CHECK(e.pos().col == 6);
  }
}

TEST_CASE("parse: minimal module") {
  NetlistAst ast = parse_text("module m(input a, output y); assign y = ~a; endmodule");
  REQUIRE(ast.modules.size() == 1);
  const ModuleDef& m = ast.modules[0];
  CHECK(m.name == "m");
  REQUIRE(m.ports.size() == 2);
  CHECK(m.ports[0].dir == Direction::Input);
  CHECK(m.ports[1].dir == Direction::Output);
  REQUIRE(m.assigns.size() == 1);
  const Expr& rhs = *m.assigns[0].rhs;
  CHECK(rhs.kind == Expr::Kind::Op);
  CHECK(rhs.op == NodeKind::Not);
  REQUIRE(rhs.args.size() == 1);
  CHECK(rhs.args[0]->kind == Expr::Kind::Ident);
  CHECK(rhs.args[0]->name == "a");
}

TEST_CASE("parse: two modules and an instance binding") {
  NetlistAst ast = parse_text(R"(
module inv(input x, output z);
  assign z = ~x;
endmodule
module top(input a, output y);
  inv u0(.x(a), .z(y));
endmodule)");
  REQUIRE(ast.modules.size() == 2);
  const ModuleDef* top = ast.find_module("top");
  REQUIRE(top != nullptr);
  REQUIRE(top->instances.size() == 1);
  CHECK(top->instances[0].module_name == "inv");
  CHECK(top->instances[0].conn_named.size() == 2);
}

TEST_CASE("parse: malformed module header is a SyntaxError at the ';'") {
  try {
    parse_text("module m(; endmodule");
    FAIL("expected SyntaxError");
  } catch (const ScanError& e) {
    CHECK(e.code() == Err::SyntaxError);
    CHECK(e.pos().line == 1);
    CHECK(e.pos().col == 10);
  }
}

TEST_CASE("parse: declaration errors") {
  CHECK(code_of([] { parse_text("module m(input a, output y); assign y = b; endmodule"); }) ==
        Err::UndeclaredIdentifier);
  CHECK(code_of([] { parse_text("module m(input a); wire w; wire w; endmodule"); }) ==
        Err::DuplicateDeclaration);
  CHECK(code_of([] {
          parse_text("module m(); endmodule module m(); endmodule");
        }) == Err::DuplicateDeclaration);
  CHECK(code_of([] {
          parse_text(R"(module s(input a, input b, output y); assign y = a & b; endmodule
                        module top(input p, input q, output r); s u(.a(p), q, .y(r)); endmodule)");
        }) == Err::SyntaxError);  // mixed named/positional binding
}

TEST_CASE("parse: non-ANSI ports and gate instances") {
  NetlistAst ast = parse_text(R"(
module m(a, b, y);
  input a, b;
  output y;
  wire t;
  and g1(t, a, b);
  buf (y, t);
endmodule)");
  const ModuleDef& m = ast.modules[0];
  CHECK(m.ports[0].dir == Direction::Input);
  CHECK(m.ports[2].dir == Direction::Output);
  REQUIRE(m.gates.size() == 2);
  CHECK(m.gates[0].gate == NodeKind::And);
  CHECK(m.gates[1].gate == NodeKind::Buf);
}

TEST_CASE("elaborate: identity elaboration prefixes the top name") {
  NetlistAst ast = parse_text("module m(input a, output y); assign y = ~a; endmodule");
  ElaboratedDesign d = elaborate(ast, "m");
  REQUIRE(d.signals.size() == 2);
  CHECK(d.signals[0].name == "m.a");
  CHECK(d.signals[1].name == "m.y");
  CHECK(d.signals[0].role == SignalInfo::Role::Input);
  CHECK(d.signals[1].role == SignalInfo::Role::Output);
  REQUIRE(d.ops.size() == 1);
  CHECK(d.ops[0].target == "m.y");
}

static const char* kAdderPair = R"(
module add1(input x, input y, output s, output c);
  wire t;
  assign t = x ^ y;
  assign s = t;
  assign c = x & y;
endmodule
module top(input a, input b, output s0, output s1, output c0, output c1);
  add1 u0(.x(a), .y(b), .s(s0), .c(c0));
  add1 u1(.x(b), .y(a), .s(s1), .c(c1));
endmodule)";

TEST_CASE("elaborate: double instantiation duplicates internal signals") {
  NetlistAst ast = parse_text(kAdderPair);
  ElaboratedDesign d = elaborate(ast, "top");
  // 6 top signals + 2 x (4 ports + 1 internal wire)
  CHECK(d.signals.size() == 6 + 2 * 5);
  CHECK(d.signal_index("top.u0.t") >= 0);
  CHECK(d.signal_index("top.u1.t") >= 0);
}

TEST_CASE("elaborate: parameter override folds everywhere") {
  const char* src = R"(
module child #(parameter WIDTH = 4)(input [WIDTH-1:0] d, output [WIDTH-1:0] q);
  localparam TOP = WIDTH - 1;
  assign q = d + TOP;
endmodule
module top(input [7:0] din, output [7:0] dout);
  child #(.WIDTH(8)) u(.d(din), .q(dout));
endmodule)";
  NetlistAst ast = parse_text(src);
  ElaboratedDesign d = elaborate(ast, "top");
  int di = d.signal_index("top.u.d");
  REQUIRE(di >= 0);
  CHECK(d.signals[static_cast<size_t>(di)].width == 8);
  // the folded constant must equal an independent evaluation of WIDTH-1 at 8
  std::map<std::string, int64_t> env{{"WIDTH", 8}};
  const ModuleDef* child = ast.find_module("child");
  int64_t expected = eval_const_expr(*child->params[1].value, env);
  CHECK(expected == 7);
  bool found = false;
  for (const auto& op : d.ops) {
    if (op.kind == ElabOp::Kind::Assign && op.target == "top.u.q") {
      REQUIRE(op.rhs->kind == Expr::Kind::Op);
      CHECK(op.rhs->op == NodeKind::Plus);
      CHECK(op.rhs->args[1]->kind == Expr::Kind::Number);
      CHECK(static_cast<int64_t>(op.rhs->args[1]->value) == expected);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("elaborate: error paths") {
  NetlistAst ast = parse_text("module m(input a); endmodule");
  CHECK(code_of([&] { elaborate(ast, "nope"); }) == Err::UnknownTop);

  CHECK(code_of([] {
          NetlistAst bad = parse_text(R"(
module a(input x); a u(.x(x)); endmodule)");
          elaborate(bad, "a");
        }) == Err::RecursiveInstantiation);

  CHECK(code_of([] {
          NetlistAst bad = parse_text(R"(
module s(input a, output y); assign y = a; endmodule
module top(input p, output q); s u(.a(p)); endmodule)");
          elaborate(bad, "top");
        }) == Err::UnboundPort);

  CHECK(code_of([] {
          NetlistAst bad = parse_text(R"(
module m(input a, input b, output y);
  assign y = a;
  assign y = b;
endmodule)");
          elaborate(bad, "m");
        }) == Err::MultipleDrivers);

  CHECK(code_of([] {
          NetlistAst bad = parse_text(R"(
module m(input clk, input a, output y);
  reg y;
  always @(posedge clk) y <= a;
  always @(posedge clk) y <= ~a;
endmodule)");
          elaborate(bad, "m");
        }) == Err::MultipleDrivers);
}

TEST_CASE("build_dfg: the ~a example") {
  Dfg g = dfg_from_text("module m(input a, output y); assign y = ~a; endmodule");
  REQUIRE(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  int a = find_node(g, "m.a");
  int y = find_node(g, "m.y");
  int nt = -1;
  for (const auto& n : g.nodes)
    if (n.kind == NodeKind::Not) nt = n.id;
  REQUIRE(a >= 0);
  REQUIRE(y >= 0);
  REQUIRE(nt >= 0);
  CHECK(g.nodes[static_cast<size_t>(a)].kind == NodeKind::Input);
  CHECK(g.nodes[static_cast<size_t>(y)].kind == NodeKind::Output);
  std::set<std::pair<int, int>> es(g.edges.begin(), g.edges.end());
  CHECK(es.count({a, nt}));
  CHECK(es.count({nt, y}));
}

TEST_CASE("build_dfg: ports-only module has terminals only") {
  Dfg g = dfg_from_text("module m(input a, input b, output y); endmodule");
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("build_dfg: shared operand gives out-degree 2") {
  Dfg g = dfg_from_text("module m(input a, input b, output y); assign y = a & (a | b); endmodule");
  int a = find_node(g, "m.a");
  REQUIRE(a >= 0);
  CHECK(out_degree(g, a) == 2);
  // node count law: 3 signals + 2 operators
  CHECK(g.node_count() == 5);
}

TEST_CASE("build_dfg: node count law on a mixed design") {
  const char* src = R"(
module m(input clk, input en, input [3:0] a, input [3:0] b, output [3:0] q, output y);
  wire [3:0] sum;
  reg [3:0] q;
  wire t;
  assign sum = a + (b * 2);
  always @(posedge clk) if (en) q <= sum;
  assign t = sum[3] ^ en;
  assign y = t ? a[0] : {b[1], en};
endmodule)";
  NetlistAst ast = parse_text(src);
  ElaboratedDesign d = elaborate(ast, "m");
  Dfg g = build_dfg(d);
  CHECK(g.node_count() == static_cast<int>(d.signals.size()) + count_op_nodes(d));
  g.validate();
}

TEST_CASE("build_dfg: dff and latch insert sequential nodes") {
  Dfg g = dfg_from_text(R"(
module m(input clk, input d, output q);
  reg q;
  always @(posedge clk) q <= d;
endmodule)");
  bool has_dff = false;
  for (const auto& n : g.nodes) has_dff = has_dff || n.kind == NodeKind::Dff;
  CHECK(has_dff);

  Dfg l = dfg_from_text(R"(
module m(input g, input d, output q);
  reg q;
  always @(*) if (g) q = d;
endmodule)");
  bool has_latch = false;
  for (const auto& n : l.nodes) has_latch = has_latch || n.kind == NodeKind::Latch;
  CHECK(has_latch);
}

TEST_CASE("detect_comb_loops: mux ring oscillator has exactly one cycle") {
  Dfg g = dfg_from_text(R"(
module m(input en, output ro);
  assign ro = en ? ~ro : 1'b0;
endmodule)");
  auto cycles = detect_comb_loops(g);
  REQUIRE(cycles.size() == 1);
  // cycle contains the ro terminal, the Not, and the Cond
  CHECK(cycles[0].size() == 3);
}

TEST_CASE("detect_comb_loops: adders are acyclic, registered rings are legal") {
  Dfg add = dfg_from_text(
      "module m(input [3:0] a, input [3:0] b, output [3:0] y); assign y = a + b; endmodule");
  CHECK(detect_comb_loops(add).empty());

  Dfg ring = dfg_from_text(R"(
module m(input clk, output q);
  reg q;
  always @(posedge clk) q <= ~q;
endmodule)");
  CHECK(detect_comb_loops(ring).empty());

  Dfg latch_ring = dfg_from_text(R"(
module m(input g, output q);
  reg q;
  wire fb;
  assign fb = ~q;
  always @(*) if (g) q = fb;
endmodule)");
  CHECK(detect_comb_loops(latch_ring).empty());
}

TEST_CASE("detect_comb_loops agrees with DFS oracle on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Dfg g;
    const int n = 2 + rng.next_below(49);
    for (int i = 0; i < n; ++i) {
      DfgNode node;
      node.id = i;
      node.kind = rng.next_below(5) == 0 ? NodeKind::Dff : NodeKind::Terminal;
      node.name = "n" + std::to_string(i);
      g.nodes.push_back(node);
    }
    std::set<std::pair<int, int>> es;
    const int m = rng.next_below(2 * n);
    for (int e = 0; e < m; ++e) es.emplace(rng.next_below(n), rng.next_below(n));
    g.edges.assign(es.begin(), es.end());

    const bool found = !detect_comb_loops(g).empty();
    CHECK(found == has_comb_cycle(g));
  }
}

TEST_CASE("dfg serialization: canonical json, deterministic, version-checked") {
  const char* src = "module m(input a, output y); assign y = ~a; endmodule";
  Dfg g1 = dfg_from_text(src);
  Dfg g2 = dfg_from_text(src);
  CHECK(g1.to_json() == g2.to_json());

  Dfg back = Dfg::from_json(g1.to_json());
  CHECK(back.node_count() == g1.node_count());
  CHECK(back.edges == g1.edges);
  for (int i = 0; i < g1.node_count(); ++i)
    CHECK(back.nodes[static_cast<size_t>(i)].kind == g1.nodes[static_cast<size_t>(i)].kind);

  std::string tampered = g1.to_json();
  auto pos = tampered.find("\"vocab_version\":1");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 17, "\"vocab_version\":9");
  CHECK(code_of([&] { Dfg::from_json(tampered); }) == Err::UnknownKind);
}

TEST_CASE("isomorphism checker: permutations yes, rewires no") {
  Dfg g = dfg_from_text(kAdderPair);
  // permuted copy
  Rng rng(5);
  std::vector<int> perm(static_cast<size_t>(g.node_count()));
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  rng.shuffle(perm);
  Dfg p;
  p.nodes.resize(static_cast<size_t>(g.node_count()));
  for (const auto& n : g.nodes) {
    DfgNode nn = n;
    nn.id = perm[static_cast<size_t>(n.id)];
    p.nodes[static_cast<size_t>(nn.id)] = nn;
  }
  for (auto [u, v] : g.edges)
    p.edges.emplace_back(perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)]);
  CHECK(dfg_isomorphic(g, p));

  // same kind multiset and edge count, different structure: path vs fork
  auto mk = [](std::vector<std::pair<int, int>> edges) {
    Dfg d;
    for (int i = 0; i < 3; ++i) {
      DfgNode n;
      n.id = i;
      n.kind = NodeKind::Terminal;
      n.name = "t" + std::to_string(i);
      d.nodes.push_back(n);
    }
    d.edges = std::move(edges);
    return d;
  };
  Dfg path = mk({{0, 1}, {1, 2}});
  Dfg fork = mk({{0, 1}, {0, 2}});
  CHECK_FALSE(dfg_isomorphic(path, fork));
}

TEST_CASE("round trip: emit then re-parse yields an isomorphic dfg") {
  const char* sources[] = {
      "module m(input a, output y); assign y = ~a; endmodule",
      kAdderPair,
      R"(
module m(input clk, input en, input [7:0] d, output [7:0] q, output p);
  reg [7:0] q;
  wire [7:0] nxt;
  assign nxt = (q << 1) ^ {d[0], en};
  always @(posedge clk) if (en) q <= nxt;
  assign p = |q;
endmodule)",
      R"(
module lat(input g, input d, output q);
  reg q;
  always @(*) if (g) q = d;
endmodule
module top(input e, input x, output z);
  lat u(.g(e), .d(x), .q(z));
endmodule)",
  };
  for (const char* src : sources) {
    NetlistAst ast = parse_text(src);
    ElaboratedDesign d = elaborate(ast, find_top(ast));
    Dfg original = build_dfg(d);
    std::string emitted = emit_verilog(d);
    CAPTURE(emitted);
    Dfg reparsed = dfg_from_text(emitted);
    CHECK(kind_multiset(original) == kind_multiset(reparsed));
    CHECK(dfg_isomorphic(original, reparsed));
  }
}

TEST_CASE("inout ports parse, alias through hierarchy, and keep their kind") {
  Dfg g = dfg_from_text(R"(
module pad(inout p, input d);
  assign p = d;
endmodule
module top(inout bus, input v);
  pad u(.p(bus), .d(v));
endmodule)");
  int b = find_node(g, "top.bus");
  REQUIRE(b >= 0);
  CHECK(g.nodes[static_cast<size_t>(b)].kind == NodeKind::Inout);
}
