#include "tracer/relational.hpp"

#include <algorithm>
#include <unordered_map>

#include "tracer/error.hpp"

namespace tracer::rel {

Universe::Universe(std::vector<std::string> atoms) {
  for (auto& a : atoms) add(a);
}

Atom Universe::add(const std::string& name) {
  auto atom = static_cast<Atom>(atoms_.size());
  if (!index_.emplace(name, atom).second) {
    throw Error(ErrorKind::InvalidArgument, "duplicate atom '" + name + "'");
  }
  atoms_.push_back(name);
  return atom;
}

std::optional<Atom> Universe::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Atom Universe::at(std::string_view name) const {
  if (auto a = find(name)) return *a;
  throw Error(ErrorKind::UnknownLocation, "unknown atom '" + std::string(name) + "'");
}

TupleSet::TupleSet(int arity, std::initializer_list<Tuple> tuples) : arity_(arity) {
  for (const auto& t : tuples) insert(t);
}

bool TupleSet::insert(Tuple t) {
  if (static_cast<int>(t.size()) != arity_) {
    throw Error(ErrorKind::InvalidArgument, "tuple of arity " + std::to_string(t.size()) +
                                                " inserted into a set of arity " + std::to_string(arity_));
  }
  return tuples_.insert(std::move(t)).second;
}

bool TupleSet::subset_of(const TupleSet& other) const {
  return std::includes(other.tuples_.begin(), other.tuples_.end(), tuples_.begin(), tuples_.end());
}

TupleSet TupleSet::unite(const TupleSet& other) const {
  TupleSet out = *this;
  out.tuples_.insert(other.tuples_.begin(), other.tuples_.end());
  return out;
}

TupleSet TupleSet::intersect(const TupleSet& other) const {
  TupleSet out(arity_);
  for (const auto& t : tuples_) {
    if (other.contains(t)) out.tuples_.insert(t);
  }
  return out;
}

TupleSet TupleSet::minus(const TupleSet& other) const {
  TupleSet out(arity_);
  for (const auto& t : tuples_) {
    if (!other.contains(t)) out.tuples_.insert(t);
  }
  return out;
}

TupleSet TupleSet::join(const TupleSet& other) const {
  TupleSet out(arity_ + other.arity_ - 2);
  std::unordered_map<Atom, std::vector<const Tuple*>> by_first;
  for (const auto& t : other.tuples_) by_first[t.front()].push_back(&t);
  for (const auto& t : tuples_) {
    auto it = by_first.find(t.back());
    if (it == by_first.end()) continue;
    for (const Tuple* u : it->second) {
      Tuple joined(t.begin(), t.end() - 1);
      joined.insert(joined.end(), u->begin() + 1, u->end());
      out.tuples_.insert(std::move(joined));
    }
  }
  return out;
}

TupleSet TupleSet::product(const TupleSet& other) const {
  TupleSet out(arity_ + other.arity_);
  for (const auto& t : tuples_) {
    for (const auto& u : other.tuples_) {
      Tuple joined = t;
      joined.insert(joined.end(), u.begin(), u.end());
      out.tuples_.insert(std::move(joined));
    }
  }
  return out;
}

TupleSet TupleSet::transpose() const {
  TupleSet out(arity_);
  for (const auto& t : tuples_) out.tuples_.insert(Tuple(t.rbegin(), t.rend()));
  return out;
}

TupleSet TupleSet::closure() const {
  TupleSet acc = *this;
  for (;;) {
    TupleSet next = acc.unite(acc.join(acc));
    if (next.size() == acc.size()) return acc;
    acc = std::move(next);
  }
}

TupleSet TupleSet::unary(const std::vector<Atom>& atoms) {
  TupleSet out(1);
  for (Atom a : atoms) out.tuples_.insert({a});
  return out;
}

TupleSet TupleSet::all(std::size_t universe_size, int arity) {
  TupleSet out(arity);
  if (arity == 0) return out;
  Tuple t(static_cast<std::size_t>(arity), 0);
  if (universe_size == 0) return out;
  for (;;) {
    out.tuples_.insert(t);
    int k = arity - 1;
    while (k >= 0 && ++t[static_cast<std::size_t>(k)] == universe_size) t[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) return out;
  }
}

const TupleSet& Instance::value(std::string_view relation) const {
  static const TupleSet kEmpty(1);
  auto it = relations.find(relation);
  return it == relations.end() ? kEmpty : it->second;
}

const RelationBounds& Bounds::at(std::string_view relation) const {
  auto it = relations.find(relation);
  if (it == relations.end()) {
    throw Error(ErrorKind::UnknownName, "no bounds for relation '" + std::string(relation) + "'");
  }
  return it->second;
}

Valuation Bounds::lower_valuation() const {
  Valuation v;
  for (const auto& [name, b] : relations) v.emplace(name, b.lower);
  return v;
}

namespace {

using forl::Expr;
using forl::ExprOp;
using forl::Formula;
using forl::FormulaOp;

TupleSet lookup(const Valuation& valuation, const std::string& name, int arity) {
  auto it = valuation.find(name);
  if (it == valuation.end()) return TupleSet(arity);
  return it->second;
}

}  // namespace

TupleSet eval_expr(const Expr& e, const Valuation& valuation, const Universe& universe, const Env& env) {
  switch (e.op) {
    case ExprOp::Name:
    case ExprOp::SigRef:
    case ExprOp::FieldRef:
      return lookup(valuation, e.name, e.arity);
    case ExprOp::VarRef: {
      auto it = env.find(e.name);
      if (it == env.end()) throw Error(ErrorKind::Internal, "unbound variable '" + e.name + "'");
      return TupleSet(1, {{it->second}});
    }
    case ExprOp::Univ: return TupleSet::all(universe.size(), 1);
    case ExprOp::Iden: {
      TupleSet out(2);
      for (Atom a = 0; a < universe.size(); ++a) out.insert({a, a});
      return out;
    }
    case ExprOp::None: return TupleSet(e.arity > 0 ? e.arity : 1);
    case ExprOp::Join:
      return eval_expr(*e.lhs, valuation, universe, env).join(eval_expr(*e.rhs, valuation, universe, env));
    case ExprOp::Product:
      return eval_expr(*e.lhs, valuation, universe, env).product(eval_expr(*e.rhs, valuation, universe, env));
    case ExprOp::Union:
      return eval_expr(*e.lhs, valuation, universe, env).unite(eval_expr(*e.rhs, valuation, universe, env));
    case ExprOp::Intersect:
      return eval_expr(*e.lhs, valuation, universe, env).intersect(eval_expr(*e.rhs, valuation, universe, env));
    case ExprOp::Difference:
      return eval_expr(*e.lhs, valuation, universe, env).minus(eval_expr(*e.rhs, valuation, universe, env));
    case ExprOp::Transpose: return eval_expr(*e.lhs, valuation, universe, env).transpose();
    case ExprOp::Closure: return eval_expr(*e.lhs, valuation, universe, env).closure();
    case ExprOp::ReflexiveClosure: {
      TupleSet out = eval_expr(*e.lhs, valuation, universe, env).closure();
      for (Atom a = 0; a < universe.size(); ++a) out.insert({a, a});
      return out;
    }
  }
  return TupleSet(1);
}

bool eval_formula(const Formula& f, const Valuation& valuation, const Universe& universe, const Env& env) {
  switch (f.op) {
    case FormulaOp::Quant: {
      TupleSet bound = eval_expr(*f.left, valuation, universe, env);
      Env inner = env;
      for (const Tuple& t : bound) {
        inner[f.var] = t[0];
        bool holds = eval_formula(*f.a, valuation, universe, inner);
        if (f.quant == forl::Quantifier::All && !holds) return false;
        if (f.quant == forl::Quantifier::Some && holds) return true;
        if (f.quant == forl::Quantifier::No && holds) return false;
      }
      return f.quant != forl::Quantifier::Some;
    }
    case FormulaOp::In:
      return eval_expr(*f.left, valuation, universe, env).subset_of(eval_expr(*f.right, valuation, universe, env));
    case FormulaOp::Equal:
      return eval_expr(*f.left, valuation, universe, env) == eval_expr(*f.right, valuation, universe, env);
    case FormulaOp::Mult: {
      std::size_t n = eval_expr(*f.left, valuation, universe, env).size();
      switch (f.mult) {
        case forl::Mult::No: return n == 0;
        case forl::Mult::Some: return n >= 1;
        case forl::Mult::Lone: return n <= 1;
        case forl::Mult::One: return n == 1;
        case forl::Mult::Set: return true;
      }
      return true;
    }
    case FormulaOp::Not: return !eval_formula(*f.a, valuation, universe, env);
    case FormulaOp::And:
      return eval_formula(*f.a, valuation, universe, env) && eval_formula(*f.b, valuation, universe, env);
    case FormulaOp::Or:
      return eval_formula(*f.a, valuation, universe, env) || eval_formula(*f.b, valuation, universe, env);
    case FormulaOp::Implies:
      return !eval_formula(*f.a, valuation, universe, env) || eval_formula(*f.b, valuation, universe, env);
    case FormulaOp::Iff:
      return eval_formula(*f.a, valuation, universe, env) == eval_formula(*f.b, valuation, universe, env);
  }
  return false;
}

std::string format_tuple(const Tuple& t, const Universe& universe) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += universe.name(t[i]);
  }
  return out + ")";
}

}  // namespace tracer::rel
