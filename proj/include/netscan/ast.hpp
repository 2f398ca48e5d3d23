#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netscan/errors.hpp"
#include "netscan/node_kind.hpp"

namespace netscan {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Expression tree node. Operator expressions carry their DFG NodeKind
/// directly, so the graph builder needs no second operator table.
struct Expr {
  enum class Kind { Ident, Number, Op };
  Kind kind = Kind::Number;
  Pos pos;

  // Ident
  std::string name;

  // Number
  uint64_t value = 0;
  int width = 0;  // 0 = unsized
  bool sized = false;

  // Op: operator NodeKind plus operands.
  //   unary ops: 1 arg; binary: 2; Cond: 3 (sel, then, else); Concat: n;
  //   Bitselect: (base, index); Partselect: (base, msb, lsb)
  NodeKind op = NodeKind::Constant;
  std::vector<ExprPtr> args;

  static ExprPtr ident(std::string n, Pos p);
  static ExprPtr number(uint64_t v, int w, bool sized, Pos p);
  static ExprPtr mk_op(NodeKind k, std::vector<ExprPtr> args, Pos p);
  ExprPtr clone() const;
};

enum class Direction { Input, Output, Inout };

/// [msb:lsb]; bounds are constant expressions (parameters allowed).
struct Range {
  ExprPtr msb;
  ExprPtr lsb;
};

struct PortDecl {
  std::string name;
  Direction dir = Direction::Input;
  std::optional<Range> range;
  bool is_reg = false;
  Pos pos;
};

struct NetDecl {
  std::string name;
  bool is_reg = false;
  std::optional<Range> range;
  Pos pos;
};

struct ParamDecl {
  std::string name;
  ExprPtr value;
  bool local = false;
  Pos pos;
};

struct AssignStmt {
  std::string target;
  ExprPtr rhs;
  Pos pos;
};

struct GateInst {
  NodeKind gate;  // And/Or/Nand/Nor/Xor/Xnor/Not/Buf
  std::string name;
  std::string output;           // first connection, must be an identifier
  std::vector<ExprPtr> inputs;  // remaining connections
  Pos pos;
};

/// Recognized single-assignment always idioms:
///   always @(posedge clk) q <= rhs;             -> Dff
///   always @(posedge clk) if (g) q <= rhs;      -> Branch feeding a Dff
///   always @(*) if (g) q = rhs;                 -> Latch
struct AlwaysBlock {
  bool clocked = false;
  std::string clock;  // valid when clocked
  ExprPtr guard;      // null for the plain Dff idiom; required for latches
  std::string target;
  ExprPtr rhs;
  Pos pos;
};

struct Instance {
  std::string module_name;
  std::string inst_name;
  bool params_named = false;
  std::vector<std::pair<std::string, ExprPtr>> param_named;
  std::vector<ExprPtr> param_positional;
  bool conns_named = false;
  std::vector<std::pair<std::string, ExprPtr>> conn_named;
  std::vector<ExprPtr> conn_positional;
  Pos pos;
};

struct ModuleDef {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<NetDecl> nets;
  std::vector<ParamDecl> params;
  std::vector<AssignStmt> assigns;
  std::vector<GateInst> gates;
  std::vector<AlwaysBlock> always_blocks;
  std::vector<Instance> instances;
  Pos pos;

  const PortDecl* find_port(const std::string& n) const;
};

struct NetlistAst {
  std::vector<ModuleDef> modules;

  const ModuleDef* find_module(const std::string& n) const;
};

}  // namespace netscan
