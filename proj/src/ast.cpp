#include "netscan/ast.hpp"

namespace netscan {

ExprPtr Expr::ident(std::string n, Pos p) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::Ident;
  e->name = std::move(n);
  e->pos = p;
  return e;
}

ExprPtr Expr::number(uint64_t v, int w, bool sized, Pos p) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::Number;
  e->value = v;
  e->width = w;
  e->sized = sized;
  e->pos = p;
  return e;
}

ExprPtr Expr::mk_op(NodeKind k, std::vector<ExprPtr> args, Pos p) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::Op;
  e->op = k;
  e->args = std::move(args);
  e->pos = p;
  return e;
}

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->pos = pos;
  e->name = name;
  e->value = value;
  e->width = width;
  e->sized = sized;
  e->op = op;
  e->args.reserve(args.size());
  for (const auto& a : args) e->args.push_back(a->clone());
  return e;
}

const PortDecl* ModuleDef::find_port(const std::string& n) const {
  for (const auto& p : ports)
    if (p.name == n) return &p;
  return nullptr;
}

const ModuleDef* NetlistAst::find_module(const std::string& n) const {
  for (const auto& m : modules)
    if (m.name == n) return &m;
  return nullptr;
}

}  // namespace netscan
