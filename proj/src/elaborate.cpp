#include "netscan/elaborate.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace netscan {

int ElaboratedDesign::signal_index(const std::string& name) const {
  for (size_t i = 0; i < signals.size(); ++i)
    if (signals[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

int64_t apply_op(NodeKind op, const std::vector<int64_t>& a, Pos pos) {
  auto truthy = [](int64_t v) { return v != 0 ? 1 : 0; };
  switch (op) {
    case NodeKind::Not: return ~a[0];
    case NodeKind::LogicalNot: return a[0] == 0 ? 1 : 0;
    case NodeKind::Minus: return a.size() == 1 ? -a[0] : a[0] - a[1];
    case NodeKind::UnaryReduceOr: return truthy(a[0]);
    case NodeKind::And: return a[0] & a[1];
    case NodeKind::Or: return a[0] | a[1];
    case NodeKind::Xor: return a[0] ^ a[1];
    case NodeKind::Xnor: return ~(a[0] ^ a[1]);
    case NodeKind::Nand: return ~(a[0] & a[1]);
    case NodeKind::Nor: return ~(a[0] | a[1]);
    case NodeKind::LogicalAnd: return truthy(a[0]) && truthy(a[1]);
    case NodeKind::LogicalOr: return truthy(a[0]) || truthy(a[1]);
    case NodeKind::Plus: return a[0] + a[1];
    case NodeKind::Times: return a[0] * a[1];
    case NodeKind::Divide:
      if (a[1] == 0) throw ScanError(Err::SyntaxError, pos, "division by zero in constant expression");
      return a[0] / a[1];
    case NodeKind::Mod:
      if (a[1] == 0) throw ScanError(Err::SyntaxError, pos, "modulo by zero in constant expression");
      return a[0] % a[1];
    case NodeKind::Eq: return a[0] == a[1];
    case NodeKind::Neq: return a[0] != a[1];
    case NodeKind::Lt: return a[0] < a[1];
    case NodeKind::Gt: return a[0] > a[1];
    case NodeKind::Le: return a[0] <= a[1];
    case NodeKind::Ge: return a[0] >= a[1];
    case NodeKind::Sll: return a[1] >= 64 ? 0 : static_cast<int64_t>(static_cast<uint64_t>(a[0]) << a[1]);
    case NodeKind::Srl: return a[1] >= 64 ? 0 : static_cast<int64_t>(static_cast<uint64_t>(a[0]) >> a[1]);
    case NodeKind::Cond: return a[0] != 0 ? a[1] : a[2];
    default:
      throw ScanError(Err::SyntaxError, pos, "operator not allowed in constant expression");
  }
}

bool is_foldable(NodeKind op) {
  switch (op) {
    case NodeKind::Concat:
    case NodeKind::Partselect:
    case NodeKind::Bitselect:
      return false;
    default:
      return true;
  }
}

struct Scope {
  std::string prefix;                                   // "top.u0."
  std::map<std::string, int64_t> params;                // folded parameter env
  std::unordered_map<std::string, std::string> names;   // local -> flat signal name
};

class Elaborator {
 public:
  Elaborator(const NetlistAst& ast, std::string top) : ast_(ast), top_(std::move(top)) {}

  ElaboratedDesign run() {
    const ModuleDef* top = ast_.find_module(top_);
    if (!top) throw ScanError(Err::UnknownTop, "module '" + top_ + "' not found");
    Scope scope;
    scope.prefix = top->name + ".";
    stack_.push_back(top->name);
    elaborate_module(*top, scope, {}, {}, true);
    stack_.pop_back();
    check_drivers();
    design_.top = top_;
    return std::move(design_);
  }

 private:
  // Folds constants, substitutes parameters, and renames identifiers to flat
  // signal names.
  ExprPtr resolve(const Expr& e, const Scope& scope) {
    switch (e.kind) {
      case Expr::Kind::Number:
        return Expr::number(e.value, e.width, e.sized, e.pos);
      case Expr::Kind::Ident: {
        auto pit = scope.params.find(e.name);
        if (pit != scope.params.end())
          return Expr::number(static_cast<uint64_t>(pit->second), 0, false, e.pos);
        auto nit = scope.names.find(e.name);
        if (nit == scope.names.end())
          throw ScanError(Err::UndeclaredIdentifier, e.pos, "'" + e.name + "'");
        return Expr::ident(nit->second, e.pos);
      }
      case Expr::Kind::Op: {
        std::vector<ExprPtr> args;
        args.reserve(e.args.size());
        bool all_const = true;
        for (const auto& a : e.args) {
          args.push_back(resolve(*a, scope));
          all_const = all_const && args.back()->kind == Expr::Kind::Number;
        }
        if (all_const && is_foldable(e.op)) {
          std::vector<int64_t> vals;
          vals.reserve(args.size());
          for (const auto& a : args) vals.push_back(static_cast<int64_t>(a->value));
          return Expr::number(static_cast<uint64_t>(apply_op(e.op, vals, e.pos)), 0, false, e.pos);
        }
        if (e.op == NodeKind::Partselect &&
            (args[1]->kind != Expr::Kind::Number || args[2]->kind != Expr::Kind::Number))
          throw ScanError(Err::SyntaxError, e.pos, "part-select bounds must be constant");
        return Expr::mk_op(e.op, std::move(args), e.pos);
      }
    }
    throw ScanError(Err::SyntaxError, e.pos, "unreachable expression kind");
  }

  int64_t const_value(const Expr& e, const Scope& scope) {
    ExprPtr r = resolve(e, scope);
    if (r->kind != Expr::Kind::Number)
      throw ScanError(Err::SyntaxError, e.pos, "expected constant expression");
    return static_cast<int64_t>(r->value);
  }

  static const std::string& flat_name(const Scope& scope, const std::string& local, Pos pos) {
    auto it = scope.names.find(local);
    if (it == scope.names.end())
      throw ScanError(Err::UndeclaredIdentifier, pos,
                      "'" + local + "' is not a signal (assignment to a parameter?)");
    return it->second;
  }

  int range_width(const std::optional<Range>& r, const Scope& scope) {
    if (!r) return 1;
    int64_t msb = const_value(*r->msb, scope);
    int64_t lsb = const_value(*r->lsb, scope);
    return static_cast<int>(msb >= lsb ? msb - lsb + 1 : lsb - msb + 1);
  }

  void add_signal(const std::string& flat, int width, bool is_reg, SignalInfo::Role role) {
    SignalInfo s;
    s.name = flat;
    s.width = width;
    s.is_reg = is_reg;
    s.role = role;
    design_.signals.push_back(std::move(s));
  }

  void elaborate_module(const ModuleDef& m, Scope& scope,
                        const std::map<std::string, int64_t>& overrides,
                        const std::unordered_map<std::string, std::string>& inout_aliases,
                        bool is_top) {
    // parameter environment: defaults in declaration order, overridable unless local
    for (const auto& p : m.params) {
      auto it = overrides.find(p.name);
      if (it != overrides.end() && !p.local) {
        scope.params[p.name] = it->second;
      } else {
        scope.params[p.name] = const_value(*p.value, scope);
      }
    }

    // signals: ports first, then nets (a net redeclaring a port only refines it)
    for (const auto& p : m.ports) {
      auto alias = inout_aliases.find(p.name);
      if (alias != inout_aliases.end()) {
        scope.names[p.name] = alias->second;  // bound inout: reuse parent signal
        continue;
      }
      const std::string flat = scope.prefix + p.name;
      scope.names[p.name] = flat;
      SignalInfo::Role role = SignalInfo::Role::Internal;
      if (is_top) {
        role = p.dir == Direction::Input    ? SignalInfo::Role::Input
               : p.dir == Direction::Output ? SignalInfo::Role::Output
                                            : SignalInfo::Role::Inout;
      }
      add_signal(flat, range_width(p.range, scope), p.is_reg, role);
    }
    for (const auto& n : m.nets) {
      if (m.find_port(n.name)) {
        if (n.is_reg) {
          int idx = design_.signal_index(scope.names.at(n.name));
          if (idx >= 0) design_.signals[static_cast<size_t>(idx)].is_reg = true;
        }
        continue;
      }
      const std::string flat = scope.prefix + n.name;
      scope.names[n.name] = flat;
      add_signal(flat, range_width(n.range, scope), n.is_reg, SignalInfo::Role::Internal);
    }

    for (const auto& a : m.assigns) {
      ElabOp op;
      op.kind = ElabOp::Kind::Assign;
      op.target = flat_name(scope, a.target, a.pos);
      op.rhs = resolve(*a.rhs, scope);
      op.pos = a.pos;
      design_.ops.push_back(std::move(op));
    }
    for (const auto& g : m.gates) {
      ElabOp op;
      op.kind = ElabOp::Kind::Gate;
      op.gate = g.gate;
      op.target = flat_name(scope, g.output, g.pos);
      for (const auto& in : g.inputs) op.inputs.push_back(resolve(*in, scope));
      op.pos = g.pos;
      design_.ops.push_back(std::move(op));
    }
    for (const auto& a : m.always_blocks) {
      ElabOp op;
      op.kind = a.clocked ? ElabOp::Kind::Dff : ElabOp::Kind::Latch;
      op.target = flat_name(scope, a.target, a.pos);
      op.rhs = resolve(*a.rhs, scope);
      if (a.clocked) op.clock = flat_name(scope, a.clock, a.pos);
      if (a.guard) op.guard = resolve(*a.guard, scope);
      op.pos = a.pos;
      design_.ops.push_back(std::move(op));
    }

    for (const auto& inst : m.instances) elaborate_instance(m, inst, scope);
  }

  void elaborate_instance(const ModuleDef& parent, const Instance& inst, Scope& scope) {
    const ModuleDef* child = ast_.find_module(inst.module_name);
    if (!child)
      throw ScanError(Err::UndeclaredIdentifier, inst.pos, "module '" + inst.module_name + "'");
    if (std::find(stack_.begin(), stack_.end(), child->name) != stack_.end()) {
      std::string cycle;
      for (const auto& s : stack_) cycle += s + " -> ";
      throw ScanError(Err::RecursiveInstantiation, inst.pos, cycle + child->name);
    }

    // parameter overrides evaluate in the parent scope
    std::map<std::string, int64_t> overrides;
    if (!inst.param_named.empty() || !inst.param_positional.empty()) {
      if (inst.params_named) {
        for (const auto& [name, e] : inst.param_named) {
          bool known = false;
          for (const auto& p : child->params)
            if (p.name == name && !p.local) known = true;
          if (!known)
            throw ScanError(Err::UndeclaredIdentifier, inst.pos,
                            "parameter '" + name + "' of module '" + child->name + "'");
          overrides[name] = const_value(*e, scope);
        }
      } else {
        std::vector<const ParamDecl*> formal;
        for (const auto& p : child->params)
          if (!p.local) formal.push_back(&p);
        if (inst.param_positional.size() > formal.size())
          throw ScanError(Err::SyntaxError, inst.pos, "too many parameter overrides");
        for (size_t k = 0; k < inst.param_positional.size(); ++k)
          overrides[formal[k]->name] = const_value(*inst.param_positional[k], scope);
      }
    }

    // pair up connections with child ports
    std::vector<std::pair<const PortDecl*, const Expr*>> bound;  // expr may be null
    if (inst.conns_named) {
      std::unordered_map<std::string, const Expr*> by_name;
      for (const auto& [name, e] : inst.conn_named) {
        if (!child->find_port(name))
          throw ScanError(Err::UnboundPort, inst.pos,
                          "no port '" + name + "' on module '" + child->name + "'");
        by_name[name] = e.get();
      }
      for (const auto& p : child->ports) {
        auto it = by_name.find(p.name);
        if (it == by_name.end())
          throw ScanError(Err::UnboundPort, inst.pos,
                          "port '" + p.name + "' of '" + child->name + "' is not connected");
        bound.emplace_back(&p, it->second);
      }
    } else {
      if (inst.conn_positional.size() != child->ports.size())
        throw ScanError(Err::UnboundPort, inst.pos,
                        "instance binds " + std::to_string(inst.conn_positional.size()) +
                            " ports, module '" + child->name + "' has " +
                            std::to_string(child->ports.size()));
      for (size_t k = 0; k < child->ports.size(); ++k)
        bound.emplace_back(&child->ports[k], inst.conn_positional[k].get());
    }

    Scope child_scope;
    child_scope.prefix = scope.prefix + inst.inst_name + ".";

    std::unordered_map<std::string, std::string> inout_aliases;
    for (const auto& [port, expr] : bound) {
      if (port->dir == Direction::Inout && expr) {
        if (expr->kind != Expr::Kind::Ident)
          throw ScanError(Err::SyntaxError, expr->pos, "inout port must bind a plain identifier");
        ExprPtr r = resolve(*expr, scope);
        inout_aliases[port->name] = r->name;
      }
    }

    stack_.push_back(child->name);
    elaborate_module(*child, child_scope, overrides, inout_aliases, false);
    stack_.pop_back();

    // connection semantics: inputs copy parent expression into the child
    // port signal; outputs copy the child port signal out to a parent signal
    for (const auto& [port, expr] : bound) {
      if (!expr) continue;  // explicitly unconnected: .p()
      const std::string child_flat = child_scope.names.at(port->name);
      if (port->dir == Direction::Input) {
        ElabOp op;
        op.kind = ElabOp::Kind::Assign;
        op.target = child_flat;
        op.rhs = resolve(*expr, scope);
        op.pos = expr->pos;
        design_.ops.push_back(std::move(op));
      } else if (port->dir == Direction::Output) {
        if (expr->kind != Expr::Kind::Ident)
          throw ScanError(Err::SyntaxError, expr->pos, "output port must bind a plain identifier");
        ElabOp op;
        op.kind = ElabOp::Kind::Assign;
        op.target = resolve(*expr, scope)->name;
        op.rhs = Expr::ident(child_flat, expr->pos);
        op.pos = expr->pos;
        design_.ops.push_back(std::move(op));
      }
      // inout handled via aliasing above
    }
  }

  void check_drivers() {
    std::unordered_map<std::string, int> drivers;
    for (const auto& op : design_.ops) ++drivers[op.target];
    for (const auto& s : design_.signals) {
      auto it = drivers.find(s.name);
      if (it != drivers.end() && it->second > 1)
        throw ScanError(Err::MultipleDrivers, "signal '" + s.name + "' has " +
                                                  std::to_string(it->second) + " drivers");
    }
  }

  const NetlistAst& ast_;
  std::string top_;
  std::vector<std::string> stack_;
  ElaboratedDesign design_;
};

}  // namespace

ElaboratedDesign elaborate(const NetlistAst& ast, const std::string& top) {
  return Elaborator(ast, top).run();
}

std::string find_top(const NetlistAst& ast) {
  std::unordered_set<std::string> instantiated;
  for (const auto& m : ast.modules)
    for (const auto& i : m.instances) instantiated.insert(i.module_name);
  std::vector<std::string> roots;
  for (const auto& m : ast.modules)
    if (!instantiated.count(m.name)) roots.push_back(m.name);
  if (roots.size() != 1)
    throw ScanError(Err::UnknownTop, roots.empty() ? "no root module (instantiation cycle?)"
                                                   : "multiple root modules; specify the top");
  return roots[0];
}

int64_t eval_const_expr(const Expr& e, const std::map<std::string, int64_t>& params) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return static_cast<int64_t>(e.value);
    case Expr::Kind::Ident: {
      auto it = params.find(e.name);
      if (it == params.end())
        throw ScanError(Err::SyntaxError, e.pos, "'" + e.name + "' is not a constant");
      return it->second;
    }
    case Expr::Kind::Op: {
      std::vector<int64_t> vals;
      vals.reserve(e.args.size());
      for (const auto& a : e.args) vals.push_back(eval_const_expr(*a, params));
      return apply_op(e.op, vals, e.pos);
    }
  }
  throw ScanError(Err::SyntaxError, e.pos, "unreachable expression kind");
}

}  // namespace netscan
