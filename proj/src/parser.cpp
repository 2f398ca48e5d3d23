#include "netscan/parser.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace netscan {

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {
    Token eof;
    eof.type = Tok::EndOfFile;
    eof.pos = toks_.empty() ? Pos{1, 1} : toks_.back().pos;
    toks_.push_back(std::move(eof));
  }

  NetlistAst parse() {
    NetlistAst ast;
    while (!at(Tok::EndOfFile)) {
      ast.modules.push_back(parse_module());
    }
    std::unordered_set<std::string> names;
    for (const auto& m : ast.modules)
      if (!names.insert(m.name).second)
        throw ScanError(Err::DuplicateDeclaration, m.pos, "module '" + m.name + "'");
    for (const auto& m : ast.modules) validate_module(m);
    return ast;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& peek(size_t ahead = 1) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok t) const { return cur().type == t; }
  Token take() { return toks_[i_++]; }
  bool accept(Tok t) {
    if (at(t)) {
      ++i_;
      return true;
    }
    return false;
  }
  Token expect(Tok t, const char* what) {
    if (!at(t))
      throw ScanError(Err::SyntaxError, cur().pos,
                      std::string("expected ") + what + ", got '" + describe(cur()) + "'");
    return take();
  }
  static std::string describe(const Token& t) {
    if (t.type == Tok::Ident) return t.text;
    if (t.type == Tok::Num) return t.text;
    return std::string(tok_name(t.type));
  }

  static bool is_gate_kw(Tok t) {
    switch (t) {
      case Tok::KwAnd: case Tok::KwOr: case Tok::KwNand: case Tok::KwNor:
      case Tok::KwXor: case Tok::KwXnor: case Tok::KwNot: case Tok::KwBuf:
        return true;
      default:
        return false;
    }
  }

  static NodeKind gate_kind(Tok t) {
    switch (t) {
      case Tok::KwAnd: return NodeKind::And;
      case Tok::KwOr: return NodeKind::Or;
      case Tok::KwNand: return NodeKind::Nand;
      case Tok::KwNor: return NodeKind::Nor;
      case Tok::KwXor: return NodeKind::Xor;
      case Tok::KwXnor: return NodeKind::Xnor;
      case Tok::KwNot: return NodeKind::Not;
      default: return NodeKind::Buf;
    }
  }

  static bool is_direction(Tok t) {
    return t == Tok::KwInput || t == Tok::KwOutput || t == Tok::KwInout;
  }
  static Direction direction(Tok t) {
    if (t == Tok::KwInput) return Direction::Input;
    if (t == Tok::KwOutput) return Direction::Output;
    return Direction::Inout;
  }

  std::optional<Range> maybe_range() {
    if (!at(Tok::LBrack)) return std::nullopt;
    take();
    Range r;
    r.msb = parse_expr();
    expect(Tok::Colon, "':' in range");
    r.lsb = parse_expr();
    expect(Tok::RBrack, "']' after range");
    return r;
  }

  ModuleDef parse_module() {
    ModuleDef m;
    m.pos = cur().pos;
    expect(Tok::KwModule, "'module'");
    m.name = expect(Tok::Ident, "module name").text;

    if (accept(Tok::Hash)) {  // module-header parameters: #(parameter N = 4, ...)
      expect(Tok::LParen, "'(' after '#'");
      do {
        accept(Tok::KwParameter);
        ParamDecl p;
        p.pos = cur().pos;
        p.name = expect(Tok::Ident, "parameter name").text;
        expect(Tok::Eq, "'=' in parameter");
        p.value = parse_expr();
        m.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')' after parameters");
    }

    expect(Tok::LParen, "'(' after module name");
    if (!at(Tok::RParen)) parse_port_list(m);
    expect(Tok::RParen, "')' after ports");
    expect(Tok::Semi, "';' after module header");

    while (!at(Tok::KwEndmodule)) {
      if (at(Tok::EndOfFile))
        throw ScanError(Err::SyntaxError, cur().pos, "missing 'endmodule'");
      parse_item(m);
    }
    take();  // endmodule
    return m;
  }

  void parse_port_list(ModuleDef& m) {
    // ANSI style (direction keywords present) or plain name list. In ANSI
    // style the last direction/range persists across subsequent bare names.
    bool ansi = is_direction(cur().type);
    if (!ansi) {
      do {
        PortDecl p;
        p.pos = cur().pos;
        p.name = expect(Tok::Ident, "port name").text;
        p.dir = Direction::Input;  // refined by body declarations
        m.ports.push_back(std::move(p));
      } while (accept(Tok::Comma));
      non_ansi_ports_ = true;
      return;
    }
    Direction dir = Direction::Input;
    bool is_reg = false;
    std::optional<Range> range;
    do {
      if (is_direction(cur().type)) {
        dir = direction(take().type);
        is_reg = accept(Tok::KwReg);
        accept(Tok::KwWire);
        range = maybe_range();
      }
      PortDecl p;
      p.pos = cur().pos;
      p.name = expect(Tok::Ident, "port name").text;
      p.dir = dir;
      p.is_reg = is_reg;
      if (range) p.range = Range{range->msb->clone(), range->lsb->clone()};
      m.ports.push_back(std::move(p));
    } while (accept(Tok::Comma));
  }

  void parse_item(ModuleDef& m) {
    const Token& t = cur();
    if (is_direction(t.type)) {
      // non-ANSI port direction declaration in the body
      Direction dir = direction(take().type);
      bool is_reg = accept(Tok::KwReg);
      auto range = maybe_range();
      do {
        Token name = expect(Tok::Ident, "port name");
        bool found = false;
        for (auto& p : m.ports) {
          if (p.name == name.text) {
            p.dir = dir;
            p.is_reg = p.is_reg || is_reg;
            if (range) p.range = Range{range->msb->clone(), range->lsb->clone()};
            found = true;
            break;
          }
        }
        if (!found)
          throw ScanError(Err::SyntaxError, name.pos,
                          "direction declared for '" + name.text + "' which is not in the port list");
      } while (accept(Tok::Comma));
      expect(Tok::Semi, "';'");
      return;
    }
    if (t.type == Tok::KwWire || t.type == Tok::KwReg) {
      bool is_reg = take().type == Tok::KwReg;
      auto range = maybe_range();
      do {
        NetDecl n;
        n.pos = cur().pos;
        n.name = expect(Tok::Ident, "net name").text;
        n.is_reg = is_reg;
        if (range) n.range = Range{range->msb->clone(), range->lsb->clone()};
        m.nets.push_back(std::move(n));
      } while (accept(Tok::Comma));
      expect(Tok::Semi, "';'");
      return;
    }
    if (t.type == Tok::KwParameter || t.type == Tok::KwLocalparam) {
      bool local = take().type == Tok::KwLocalparam;
      do {
        ParamDecl p;
        p.pos = cur().pos;
        p.local = local;
        p.name = expect(Tok::Ident, "parameter name").text;
        expect(Tok::Eq, "'='");
        p.value = parse_expr();
        m.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
      expect(Tok::Semi, "';'");
      return;
    }
    if (t.type == Tok::KwAssign) {
      take();
      AssignStmt a;
      a.pos = cur().pos;
      a.target = expect(Tok::Ident, "assignment target").text;
      expect(Tok::Eq, "'='");
      a.rhs = parse_expr();
      expect(Tok::Semi, "';'");
      m.assigns.push_back(std::move(a));
      return;
    }
    if (is_gate_kw(t.type)) {
      GateInst g;
      g.pos = t.pos;
      g.gate = gate_kind(take().type);
      if (at(Tok::Ident)) g.name = take().text;
      expect(Tok::LParen, "'(' in gate instance");
      Token out = expect(Tok::Ident, "gate output identifier");
      g.output = out.text;
      expect(Tok::Comma, "',' after gate output");
      do {
        g.inputs.push_back(parse_expr());
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
      expect(Tok::Semi, "';'");
      if ((g.gate == NodeKind::Not || g.gate == NodeKind::Buf) && g.inputs.size() != 1)
        throw ScanError(Err::SyntaxError, g.pos, "not/buf take exactly one input");
      m.gates.push_back(std::move(g));
      return;
    }
    if (t.type == Tok::KwAlways) {
      m.always_blocks.push_back(parse_always());
      return;
    }
    if (t.type == Tok::Ident) {
      m.instances.push_back(parse_instance());
      return;
    }
    throw ScanError(Err::SyntaxError, t.pos, "unexpected '" + describe(t) + "' in module body");
  }

  AlwaysBlock parse_always() {
    AlwaysBlock a;
    a.pos = cur().pos;
    expect(Tok::KwAlways, "'always'");
    expect(Tok::At, "'@'");
    expect(Tok::LParen, "'('");
    if (accept(Tok::KwPosedge)) {
      a.clocked = true;
      a.clock = expect(Tok::Ident, "clock identifier").text;
    } else {
      expect(Tok::Star, "'*' or 'posedge'");
      a.clocked = false;
    }
    expect(Tok::RParen, "')'");

    bool has_begin = accept(Tok::KwBegin);
    if (accept(Tok::KwIf)) {
      expect(Tok::LParen, "'('");
      a.guard = parse_expr();
      expect(Tok::RParen, "')'");
    } else if (!a.clocked) {
      throw ScanError(Err::SyntaxError, a.pos,
                      "always @(*) must use the 'if (enable) target = expr;' latch idiom");
    }
    a.target = expect(Tok::Ident, "assignment target").text;
    if (a.clocked) {
      expect(Tok::LtEq, "'<=' (nonblocking) in clocked block");
    } else {
      expect(Tok::Eq, "'=' (blocking) in combinational block");
    }
    a.rhs = parse_expr();
    expect(Tok::Semi, "';'");
    if (has_begin) expect(Tok::KwEnd, "'end'");
    return a;
  }

  Instance parse_instance() {
    Instance inst;
    inst.pos = cur().pos;
    inst.module_name = expect(Tok::Ident, "module name").text;
    if (accept(Tok::Hash)) {
      expect(Tok::LParen, "'(' after '#'");
      bool named = at(Tok::Dot);
      inst.params_named = named;
      do {
        if (at(Tok::Dot) != named)
          throw ScanError(Err::SyntaxError, cur().pos,
                          "parameter overrides must be all by-name or all positional");
        if (named) {
          take();  // '.'
          std::string pname = expect(Tok::Ident, "parameter name").text;
          expect(Tok::LParen, "'('");
          inst.param_named.emplace_back(std::move(pname), parse_expr());
          expect(Tok::RParen, "')'");
        } else {
          inst.param_positional.push_back(parse_expr());
        }
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    inst.inst_name = expect(Tok::Ident, "instance name").text;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      bool named = at(Tok::Dot);
      inst.conns_named = named;
      do {
        if (at(Tok::Dot) != named)
          throw ScanError(Err::SyntaxError, cur().pos,
                          "port bindings must be all by-name or all positional");
        if (named) {
          take();  // '.'
          std::string pname = expect(Tok::Ident, "port name").text;
          expect(Tok::LParen, "'('");
          ExprPtr e;
          if (!at(Tok::RParen)) e = parse_expr();
          inst.conn_named.emplace_back(std::move(pname), std::move(e));
          expect(Tok::RParen, "')'");
        } else {
          inst.conn_positional.push_back(parse_expr());
        }
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    return inst;
  }

  // ---- expressions, precedence climbing ----

  ExprPtr parse_expr() { return parse_cond(); }

  ExprPtr parse_cond() {
    ExprPtr c = parse_logical_or();
    if (accept(Tok::Question)) {
      Pos p = c->pos;
      ExprPtr t = parse_expr();
      expect(Tok::Colon, "':' in conditional");
      ExprPtr f = parse_cond();
      std::vector<ExprPtr> args;
      args.push_back(std::move(c));
      args.push_back(std::move(t));
      args.push_back(std::move(f));
      return Expr::mk_op(NodeKind::Cond, std::move(args), p);
    }
    return c;
  }

  ExprPtr binary_chain(ExprPtr (Parser::*next)(), std::initializer_list<std::pair<Tok, NodeKind>> ops) {
    ExprPtr lhs = (this->*next)();
    for (;;) {
      bool matched = false;
      for (auto [tok, kind] : ops) {
        if (at(tok)) {
          Pos p = cur().pos;
          take();
          ExprPtr rhs = (this->*next)();
          std::vector<ExprPtr> args;
          args.push_back(std::move(lhs));
          args.push_back(std::move(rhs));
          lhs = Expr::mk_op(kind, std::move(args), p);
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  ExprPtr parse_logical_or() {
    return binary_chain(&Parser::parse_logical_and, {{Tok::PipePipe, NodeKind::LogicalOr}});
  }
  ExprPtr parse_logical_and() {
    return binary_chain(&Parser::parse_bit_or, {{Tok::AmpAmp, NodeKind::LogicalAnd}});
  }
  ExprPtr parse_bit_or() {
    return binary_chain(&Parser::parse_bit_xor, {{Tok::Pipe, NodeKind::Or}});
  }
  ExprPtr parse_bit_xor() {
    return binary_chain(&Parser::parse_bit_and,
                        {{Tok::Caret, NodeKind::Xor}, {Tok::TildeCaret, NodeKind::Xnor}});
  }
  ExprPtr parse_bit_and() {
    return binary_chain(&Parser::parse_equality, {{Tok::Amp, NodeKind::And}});
  }
  ExprPtr parse_equality() {
    return binary_chain(&Parser::parse_relational,
                        {{Tok::EqEq, NodeKind::Eq}, {Tok::BangEq, NodeKind::Neq}});
  }
  ExprPtr parse_relational() {
    return binary_chain(&Parser::parse_shift, {{Tok::Lt, NodeKind::Lt},
                                               {Tok::Gt, NodeKind::Gt},
                                               {Tok::LtEq, NodeKind::Le},
                                               {Tok::GtEq, NodeKind::Ge}});
  }
  ExprPtr parse_shift() {
    return binary_chain(&Parser::parse_additive,
                        {{Tok::Shl, NodeKind::Sll}, {Tok::Shr, NodeKind::Srl}});
  }
  ExprPtr parse_additive() {
    return binary_chain(&Parser::parse_multiplicative,
                        {{Tok::Plus, NodeKind::Plus}, {Tok::Minus, NodeKind::Minus}});
  }
  ExprPtr parse_multiplicative() {
    return binary_chain(&Parser::parse_unary, {{Tok::Star, NodeKind::Times},
                                               {Tok::Slash, NodeKind::Divide},
                                               {Tok::Percent, NodeKind::Mod}});
  }

  ExprPtr parse_unary() {
    Pos p = cur().pos;
    auto unary = [&](NodeKind k) {
      take();
      std::vector<ExprPtr> args;
      args.push_back(parse_unary());
      return Expr::mk_op(k, std::move(args), p);
    };
    switch (cur().type) {
      case Tok::TildeOp: return unary(NodeKind::Not);
      case Tok::Bang: return unary(NodeKind::LogicalNot);
      case Tok::Minus: return unary(NodeKind::Minus);
      case Tok::Pipe: return unary(NodeKind::UnaryReduceOr);
      case Tok::Plus: take(); return parse_unary();  // unary plus is a no-op
      default: return parse_primary();
    }
  }

  ExprPtr parse_primary() {
    const Token t = cur();
    if (t.type == Tok::Num) {
      take();
      return Expr::number(t.value, t.width, t.sized, t.pos);
    }
    if (t.type == Tok::LParen) {
      take();
      ExprPtr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.type == Tok::LBrace) {
      take();
      std::vector<ExprPtr> parts;
      do {
        parts.push_back(parse_expr());
      } while (accept(Tok::Comma));
      expect(Tok::RBrace, "'}'");
      return Expr::mk_op(NodeKind::Concat, std::move(parts), t.pos);
    }
    if (t.type == Tok::Ident) {
      take();
      ExprPtr base = Expr::ident(t.text, t.pos);
      if (accept(Tok::LBrack)) {
        ExprPtr first = parse_expr();
        if (accept(Tok::Colon)) {
          ExprPtr lsb = parse_expr();
          expect(Tok::RBrack, "']'");
          std::vector<ExprPtr> args;
          args.push_back(std::move(base));
          args.push_back(std::move(first));
          args.push_back(std::move(lsb));
          return Expr::mk_op(NodeKind::Partselect, std::move(args), t.pos);
        }
        expect(Tok::RBrack, "']'");
        std::vector<ExprPtr> args;
        args.push_back(std::move(base));
        args.push_back(std::move(first));
        return Expr::mk_op(NodeKind::Bitselect, std::move(args), t.pos);
      }
      return base;
    }
    throw ScanError(Err::SyntaxError, t.pos, "expected expression, got '" + describe(t) + "'");
  }

  // ---- post-parse validation ----

  static void collect_idents(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind == Expr::Kind::Ident) out.push_back(&e);
    for (const auto& a : e.args) collect_idents(*a, out);
  }

  void validate_module(const ModuleDef& m) {
    std::unordered_set<std::string> declared;
    auto declare = [&](const std::string& n, Pos p) {
      if (!declared.insert(n).second)
        throw ScanError(Err::DuplicateDeclaration, p, "'" + n + "' in module '" + m.name + "'");
    };
    std::unordered_set<std::string> port_names;
    for (const auto& p : m.ports) {
      declare(p.name, p.pos);
      port_names.insert(p.name);
    }
    std::unordered_set<std::string> refined;
    for (const auto& n : m.nets) {
      // `output y; reg y;` is a refinement of the port, not a redeclaration
      if (port_names.count(n.name)) {
        if (!refined.insert(n.name).second)
          throw ScanError(Err::DuplicateDeclaration, n.pos, "'" + n.name + "' in module '" + m.name + "'");
        continue;
      }
      declare(n.name, n.pos);
    }
    for (const auto& p : m.params) declare(p.name, p.pos);
    std::unordered_set<std::string> inst_names;
    for (const auto& i : m.instances)
      if (!inst_names.insert(i.inst_name).second)
        throw ScanError(Err::DuplicateDeclaration, i.pos, "instance '" + i.inst_name + "'");

    auto check_expr = [&](const Expr& e) {
      std::vector<const Expr*> ids;
      collect_idents(e, ids);
      for (const Expr* id : ids)
        if (!declared.count(id->name))
          throw ScanError(Err::UndeclaredIdentifier, id->pos,
                          "'" + id->name + "' in module '" + m.name + "'");
    };
    auto check_target = [&](const std::string& n, Pos p) {
      if (!declared.count(n))
        throw ScanError(Err::UndeclaredIdentifier, p, "'" + n + "' in module '" + m.name + "'");
    };

    for (const auto& p : m.params) check_expr(*p.value);
    for (const auto& p : m.ports) {
      if (p.range) {
        check_expr(*p.range->msb);
        check_expr(*p.range->lsb);
      }
    }
    for (const auto& n : m.nets) {
      if (n.range) {
        check_expr(*n.range->msb);
        check_expr(*n.range->lsb);
      }
    }
    for (const auto& a : m.assigns) {
      check_target(a.target, a.pos);
      check_expr(*a.rhs);
    }
    for (const auto& g : m.gates) {
      check_target(g.output, g.pos);
      for (const auto& in : g.inputs) check_expr(*in);
    }
    for (const auto& a : m.always_blocks) {
      check_target(a.target, a.pos);
      if (a.clocked) check_target(a.clock, a.pos);
      if (a.guard) check_expr(*a.guard);
      check_expr(*a.rhs);
    }
    for (const auto& inst : m.instances) {
      for (const auto& [name, e] : inst.param_named) check_expr(*e);
      for (const auto& e : inst.param_positional) check_expr(*e);
      for (const auto& [name, e] : inst.conn_named)
        if (e) check_expr(*e);
      for (const auto& e : inst.conn_positional) check_expr(*e);
    }
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
  bool non_ansi_ports_ = false;
};

}  // namespace

NetlistAst parse_netlist(std::vector<Token> tokens) { return Parser(std::move(tokens)).parse(); }

NetlistAst parse_text(std::string_view text) { return parse_netlist(tokenize(text)); }

NetlistAst parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScanError(Err::MissingFile, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

}  // namespace netscan
