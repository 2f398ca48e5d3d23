#pragma once

#include <map>
#include <string>
#include <vector>

#include "netscan/ast.hpp"

namespace netscan {

/// Flat signal after hierarchy inlining. Names are dot-joined paths rooted at
/// the top module's name (e.g. "top.u0.sum").
struct SignalInfo {
  enum class Role { Internal, Input, Output, Inout };
  std::string name;
  int width = 1;
  bool is_reg = false;
  Role role = Role::Internal;
};

/// Flat operation with constants folded and identifiers resolved to flat
/// signal names.
struct ElabOp {
  enum class Kind { Assign, Gate, Dff, Latch };
  Kind kind = Kind::Assign;
  std::string target;
  ExprPtr rhs;                    // Assign / Dff / Latch data expression
  NodeKind gate = NodeKind::Buf;  // Gate only
  std::vector<ExprPtr> inputs;    // Gate only
  std::string clock;              // Dff only
  ExprPtr guard;                  // optional enable (Dff), required gate (Latch)
  Pos pos;
};

struct ElaboratedDesign {
  std::string top;
  std::vector<SignalInfo> signals;
  std::vector<ElabOp> ops;

  int signal_index(const std::string& name) const;  // -1 if absent
};

/// Inline the hierarchy under `top`, fold parameters, and enforce the
/// at-most-one-driver rule. Undriven signals are permitted (ports-only
/// modules are legal); multiple drivers are an error.
ElaboratedDesign elaborate(const NetlistAst& ast, const std::string& top);

/// The unique module that no other module instantiates. Throws UnknownTop if
/// there is no such module or more than one.
std::string find_top(const NetlistAst& ast);

/// Integer value of a constant expression (parameters pre-substituted).
/// Throws SyntaxError if the expression is not constant.
int64_t eval_const_expr(const Expr& e, const std::map<std::string, int64_t>& params);

}  // namespace netscan
