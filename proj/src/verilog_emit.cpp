#include "netscan/verilog_emit.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace netscan {

namespace {

class Emitter {
 public:
  explicit Emitter(const ElaboratedDesign& d, std::string module_name)
      : d_(d), module_name_(std::move(module_name)) {
    mangle_names();
  }

  std::string run() {
    std::ostringstream out;
    out << "module " << module_name_ << "(";
    bool first = true;
    for (const auto& s : d_.signals) {
      if (s.role == SignalInfo::Role::Internal) continue;
      if (!first) out << ", ";
      first = false;
      out << dir_str(s.role) << ((s.is_reg || driven_by_seq(s.name)) ? " reg" : "")
          << range_str(s.width) << " " << name_of(s.name);
    }
    out << ");\n";

    for (const auto& s : d_.signals) {
      if (s.role != SignalInfo::Role::Internal) continue;
      out << "  " << (s.is_reg || driven_by_seq(s.name) ? "reg" : "wire") << range_str(s.width)
          << " " << name_of(s.name) << ";\n";
    }

    for (const auto& op : d_.ops) {
      switch (op.kind) {
        case ElabOp::Kind::Assign:
          out << "  assign " << name_of(op.target) << " = " << expr_str(*op.rhs) << ";\n";
          break;
        case ElabOp::Kind::Gate: {
          out << "  " << gate_str(op.gate) << " (" << name_of(op.target);
          for (const auto& in : op.inputs) out << ", " << expr_str(*in);
          out << ");\n";
          break;
        }
        case ElabOp::Kind::Dff:
          out << "  always @(posedge " << name_of(op.clock) << ") ";
          if (op.guard) out << "if (" << expr_str(*op.guard) << ") ";
          out << name_of(op.target) << " <= " << expr_str(*op.rhs) << ";\n";
          break;
        case ElabOp::Kind::Latch:
          out << "  always @(*) if (" << expr_str(*op.guard) << ") " << name_of(op.target)
              << " = " << expr_str(*op.rhs) << ";\n";
          break;
      }
    }
    out << "endmodule\n";
    return out.str();
  }

 private:
  void mangle_names() {
    std::unordered_set<std::string> used;
    for (const auto& s : d_.signals) {
      std::string m;
      for (char c : s.name) {
        if (c == '.')
          m += "__";
        else
          m += c;
      }
      std::string candidate = m;
      int suffix = 1;
      while (!used.insert(candidate).second) candidate = m + "_" + std::to_string(suffix++);
      names_[s.name] = candidate;
    }
  }

  const std::string& name_of(const std::string& flat) const { return names_.at(flat); }

  bool driven_by_seq(const std::string& flat) const {
    for (const auto& op : d_.ops)
      if (op.target == flat && (op.kind == ElabOp::Kind::Dff || op.kind == ElabOp::Kind::Latch))
        return true;
    return false;
  }

  static std::string dir_str(SignalInfo::Role r) {
    switch (r) {
      case SignalInfo::Role::Input: return "input";
      case SignalInfo::Role::Output: return "output";
      case SignalInfo::Role::Inout: return "inout";
      default: return "wire";
    }
  }

  static std::string range_str(int width) {
    if (width <= 1) return "";
    return " [" + std::to_string(width - 1) + ":0]";
  }

  static std::string gate_str(NodeKind k) {
    switch (k) {
      case NodeKind::And: return "and";
      case NodeKind::Or: return "or";
      case NodeKind::Nand: return "nand";
      case NodeKind::Nor: return "nor";
      case NodeKind::Xor: return "xor";
      case NodeKind::Xnor: return "xnor";
      case NodeKind::Not: return "not";
      default: return "buf";
    }
  }

  std::string expr_str(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Ident:
        return name_of(e.name);
      case Expr::Kind::Number:
        return e.sized ? std::to_string(e.width) + "'d" + std::to_string(e.value)
                       : std::to_string(e.value);
      case Expr::Kind::Op:
        break;
    }
    const auto& a = e.args;
    switch (e.op) {
      case NodeKind::Cond:
        return "(" + expr_str(*a[0]) + " ? " + expr_str(*a[1]) + " : " + expr_str(*a[2]) + ")";
      case NodeKind::Concat: {
        std::string s = "{";
        for (size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + expr_str(*a[i]);
        return s + "}";
      }
      case NodeKind::Bitselect:
        return expr_str(*a[0]) + "[" + expr_str(*a[1]) + "]";
      case NodeKind::Partselect:
        return expr_str(*a[0]) + "[" + expr_str(*a[1]) + ":" + expr_str(*a[2]) + "]";
      case NodeKind::Not:
        return "(~" + expr_str(*a[0]) + ")";
      case NodeKind::LogicalNot:
        return "(!" + expr_str(*a[0]) + ")";
      case NodeKind::UnaryReduceOr:
        return "(|" + expr_str(*a[0]) + ")";
      case NodeKind::Minus:
        if (a.size() == 1) return "(-" + expr_str(*a[0]) + ")";
        return "(" + expr_str(*a[0]) + " - " + expr_str(*a[1]) + ")";
      default:
        return "(" + expr_str(*a[0]) + " " + binop_str(e.op) + " " + expr_str(*a[1]) + ")";
    }
  }

  static std::string binop_str(NodeKind k) {
    switch (k) {
      case NodeKind::And: return "&";
      case NodeKind::Or: return "|";
      case NodeKind::Xor: return "^";
      case NodeKind::Xnor: return "~^";
      case NodeKind::LogicalAnd: return "&&";
      case NodeKind::LogicalOr: return "||";
      case NodeKind::Plus: return "+";
      case NodeKind::Times: return "*";
      case NodeKind::Divide: return "/";
      case NodeKind::Mod: return "%";
      case NodeKind::Eq: return "==";
      case NodeKind::Neq: return "!=";
      case NodeKind::Lt: return "<";
      case NodeKind::Gt: return ">";
      case NodeKind::Le: return "<=";
      case NodeKind::Ge: return ">=";
      case NodeKind::Sll: return "<<";
      case NodeKind::Srl: return ">>";
      default:
        throw ScanError(Err::GeneratorError, "unprintable operator");
    }
  }

  const ElaboratedDesign& d_;
  std::string module_name_;
  std::unordered_map<std::string, std::string> names_;
};

}  // namespace

std::string emit_verilog(const ElaboratedDesign& design, const std::string& module_name) {
  return Emitter(design, module_name).run();
}

}  // namespace netscan
