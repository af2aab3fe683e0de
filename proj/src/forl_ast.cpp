#include "tracer/forl_ast.hpp"

namespace tracer::forl {

ExprPtr make_name(std::string name, Span span) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::Name;
  e->name = std::move(name);
  e->span = span;
  return e;
}

ExprPtr make_unary(ExprOp op, ExprPtr operand, Span span) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(operand);
  e->span = span;
  return e;
}

ExprPtr make_binary(ExprOp op, ExprPtr lhs, ExprPtr rhs, Span span) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->span = span;
  return e;
}

ExprPtr make_constant(ExprOp op, Span span) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->span = span;
  return e;
}

FormulaPtr make_quant(Quantifier q, std::string var, ExprPtr bound, FormulaPtr body, Span span) {
  auto f = std::make_shared<Formula>();
  f->op = FormulaOp::Quant;
  f->quant = q;
  f->var = std::move(var);
  f->left = std::move(bound);
  f->a = std::move(body);
  f->span = span;
  return f;
}

FormulaPtr make_compare(FormulaOp op, ExprPtr lhs, ExprPtr rhs, Span span) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->left = std::move(lhs);
  f->right = std::move(rhs);
  f->span = span;
  return f;
}

FormulaPtr make_mult(Mult m, ExprPtr operand, Span span) {
  auto f = std::make_shared<Formula>();
  f->op = FormulaOp::Mult;
  f->mult = m;
  f->left = std::move(operand);
  f->span = span;
  return f;
}

FormulaPtr make_not(FormulaPtr operand, Span span) {
  auto f = std::make_shared<Formula>();
  f->op = FormulaOp::Not;
  f->a = std::move(operand);
  f->span = span;
  return f;
}

FormulaPtr make_binary(FormulaOp op, FormulaPtr a, FormulaPtr b, Span span) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->a = std::move(a);
  f->b = std::move(b);
  f->span = span;
  return f;
}

namespace {

bool same_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same(*a, *b);
}

bool same_ptr(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  return same(*a, *b);
}

// Resolution only refines Name into one of the reference kinds.
bool is_reference(ExprOp op) {
  return op == ExprOp::Name || op == ExprOp::SigRef || op == ExprOp::FieldRef || op == ExprOp::VarRef;
}

}  // namespace

bool same(const Expr& a, const Expr& b) {
  if (is_reference(a.op) || is_reference(b.op)) {
    return is_reference(a.op) && is_reference(b.op) && a.name == b.name;
  }
  return a.op == b.op && same_ptr(a.lhs, b.lhs) && same_ptr(a.rhs, b.rhs);
}

bool same(const Formula& a, const Formula& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case FormulaOp::Quant:
      return a.quant == b.quant && a.var == b.var && same_ptr(a.left, b.left) && same_ptr(a.a, b.a);
    case FormulaOp::In:
    case FormulaOp::Equal:
      return same_ptr(a.left, b.left) && same_ptr(a.right, b.right);
    case FormulaOp::Mult:
      return a.mult == b.mult && same_ptr(a.left, b.left);
    case FormulaOp::Not:
      return same_ptr(a.a, b.a);
    default:
      return same_ptr(a.a, b.a) && same_ptr(a.b, b.b);
  }
}

bool same(const SpecAst& a, const SpecAst& b) {
  if (a.sigs.size() != b.sigs.size() || a.facts.size() != b.facts.size()) return false;
  for (std::size_t i = 0; i < a.sigs.size(); ++i) {
    const SigDecl& x = a.sigs[i];
    const SigDecl& y = b.sigs[i];
    if (x.name != y.name || x.is_abstract != y.is_abstract || x.kind != y.kind || x.parents != y.parents ||
        x.fields.size() != y.fields.size()) {
      return false;
    }
    for (std::size_t k = 0; k < x.fields.size(); ++k) {
      const FieldDecl& f = x.fields[k];
      const FieldDecl& g = y.fields[k];
      if (f.name != g.name || f.columns != g.columns || f.m != g.m || f.n != g.n) return false;
    }
  }
  for (std::size_t i = 0; i < a.facts.size(); ++i) {
    const FactDecl& x = a.facts[i];
    const FactDecl& y = b.facts[i];
    if (x.name != y.name || x.reason != y.reason || x.body.size() != y.body.size()) return false;
    for (std::size_t k = 0; k < x.body.size(); ++k) {
      if (!same(*x.body[k], *y.body[k])) return false;
    }
  }
  return true;
}

std::string_view to_string(Mult m) {
  switch (m) {
    case Mult::No: return "no";
    case Mult::Lone: return "lone";
    case Mult::One: return "one";
    case Mult::Some: return "some";
    case Mult::Set: return "set";
  }
  return "set";
}

std::string_view to_string(Quantifier q) {
  switch (q) {
    case Quantifier::All: return "all";
    case Quantifier::Some: return "some";
    case Quantifier::No: return "no";
  }
  return "all";
}

}  // namespace tracer::forl
