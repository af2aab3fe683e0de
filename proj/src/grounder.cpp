#include <algorithm>
#include <limits>
#include <optional>

#include "tracer/error.hpp"
#include "tracer/grounder.hpp"

namespace tracer::ground {

using forl::Expr;
using forl::ExprOp;
using forl::Formula;
using forl::FormulaOp;

namespace {

std::uint64_t power(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base) {
      throw Error(ErrorKind::ResourceLimit, "tuple space too large to index");
    }
    r *= base;
  }
  return r;
}

}  // namespace

Grounder::Grounder(BoolCircuit& circuit, const VarMap& vars, const rel::Bounds& bounds)
    : circuit_(circuit), vars_(vars), bounds_(bounds), base_(std::max<std::uint64_t>(1, bounds.universe.size())) {}

std::uint64_t Grounder::encode(const rel::Tuple& t) const {
  std::uint64_t code = 0;
  for (rel::Atom a : t) code = code * base_ + a;
  return code;
}

rel::Tuple Grounder::decode(std::uint64_t code, int arity) const {
  rel::Tuple t(static_cast<std::size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = static_cast<rel::Atom>(code % base_);
    code /= base_;
  }
  return t;
}

Matrix Grounder::relation(const std::string& name, int arity) {
  Matrix m{arity, {}};
  const rel::RelationBounds& rb = bounds_.at(name);
  for (const rel::Tuple& t : rb.upper) {
    NodeId node = rb.lower.contains(t) ? BoolCircuit::kTrue : circuit_.var(vars_.find(name, t));
    m.cells.emplace_hint(m.cells.end(), encode(t), node);
  }
  return m;
}

Matrix Grounder::join(const Matrix& a, const Matrix& b) {
  const int arity = a.arity + b.arity - 2;
  const std::uint64_t tail = power(base_, b.arity - 1);
  std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, NodeId>>> by_first;
  for (const auto& [code, node] : b.cells) by_first[code / tail].emplace_back(code % tail, node);
  std::map<std::uint64_t, std::vector<NodeId>> terms;
  for (const auto& [code, node] : a.cells) {
    auto it = by_first.find(code % base_);
    if (it == by_first.end()) continue;
    const std::uint64_t prefix = (code / base_) * tail;
    for (const auto& [rest, other] : it->second) {
      NodeId both = circuit_.make_and(node, other);
      if (both != BoolCircuit::kFalse) terms[prefix + rest].push_back(both);
    }
  }
  Matrix out{arity, {}};
  for (auto& [code, nodes] : terms) {
    NodeId n = circuit_.make_or(std::move(nodes));
    if (n != BoolCircuit::kFalse) out.cells.emplace_hint(out.cells.end(), code, n);
  }
  return out;
}

Matrix Grounder::unite(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  for (const auto& [code, node] : b.cells) {
    auto [it, inserted] = out.cells.emplace(code, node);
    if (!inserted) it->second = circuit_.make_or(it->second, node);
  }
  return out;
}

Matrix Grounder::closure(const Matrix& m) {
  Matrix acc = m;
  std::size_t rounds = 0;
  for (std::uint64_t reach = 1; reach < base_; reach *= 2) ++rounds;
  for (std::size_t i = 0; i < rounds; ++i) {
    Matrix next = unite(acc, join(acc, acc));
    if (next.cells == acc.cells) break;
    acc = std::move(next);
  }
  return acc;
}

NodeId Grounder::subset(const Matrix& a, const Matrix& b) {
  std::vector<NodeId> conj;
  for (const auto& [code, node] : a.cells) {
    auto it = b.cells.find(code);
    NodeId rhs = it == b.cells.end() ? BoolCircuit::kFalse : it->second;
    conj.push_back(circuit_.make_implies(node, rhs));
    if (conj.back() == BoolCircuit::kFalse) return BoolCircuit::kFalse;
  }
  return circuit_.make_and(std::move(conj));
}

NodeId Grounder::cardinality(forl::Mult mult, const Matrix& m) {
  std::vector<NodeId> cells;
  for (const auto& [code, node] : m.cells) cells.push_back(node);
  auto some = [&] { return circuit_.make_or(cells); };
  // Sequential counter: `seen` holds iff some earlier cell is true.
  auto lone = [&] {
    std::vector<NodeId> conj;
    NodeId seen = BoolCircuit::kFalse;
    for (NodeId c : cells) {
      conj.push_back(circuit_.make_not(circuit_.make_and(seen, c)));
      seen = circuit_.make_or(seen, c);
    }
    return circuit_.make_and(std::move(conj));
  };
  switch (mult) {
    case forl::Mult::Set: return BoolCircuit::kTrue;
    case forl::Mult::No: return circuit_.make_not(some());
    case forl::Mult::Some: return some();
    case forl::Mult::Lone: return lone();
    case forl::Mult::One: return circuit_.make_and(some(), lone());
  }
  return BoolCircuit::kTrue;
}

Matrix Grounder::expr(const Expr& e) {
  const std::size_t n = bounds_.universe.size();
  switch (e.op) {
    case ExprOp::Name:
    case ExprOp::VarRef: {
      auto it = env_.find(e.name);
      if (it != env_.end()) return Matrix{1, {{it->second, BoolCircuit::kTrue}}};
      if (e.op == ExprOp::VarRef) throw Error(ErrorKind::Internal, "unbound variable '" + e.name + "'");
      return relation(e.name, e.arity);
    }
    case ExprOp::SigRef:
    case ExprOp::FieldRef: return relation(e.name, e.arity);
    case ExprOp::Univ: {
      Matrix m{1, {}};
      for (std::uint64_t a = 0; a < n; ++a) m.cells.emplace_hint(m.cells.end(), a, BoolCircuit::kTrue);
      return m;
    }
    case ExprOp::Iden: {
      Matrix m{2, {}};
      for (std::uint64_t a = 0; a < n; ++a) m.cells.emplace_hint(m.cells.end(), a * base_ + a, BoolCircuit::kTrue);
      return m;
    }
    case ExprOp::None: return Matrix{std::max(1, e.arity), {}};
    case ExprOp::Join: return join(expr(*e.lhs), expr(*e.rhs));
    case ExprOp::Product: {
      Matrix a = expr(*e.lhs);
      Matrix b = expr(*e.rhs);
      const std::uint64_t shift = power(base_, b.arity);
      Matrix out{a.arity + b.arity, {}};
      for (const auto& [ca, na] : a.cells) {
        for (const auto& [cb, nb] : b.cells) {
          NodeId both = circuit_.make_and(na, nb);
          if (both != BoolCircuit::kFalse) out.cells.emplace_hint(out.cells.end(), ca * shift + cb, both);
        }
      }
      return out;
    }
    case ExprOp::Union: return unite(expr(*e.lhs), expr(*e.rhs));
    case ExprOp::Intersect: {
      Matrix a = expr(*e.lhs);
      Matrix b = expr(*e.rhs);
      Matrix out{a.arity, {}};
      for (const auto& [code, node] : a.cells) {
        auto it = b.cells.find(code);
        if (it == b.cells.end()) continue;
        NodeId both = circuit_.make_and(node, it->second);
        if (both != BoolCircuit::kFalse) out.cells.emplace_hint(out.cells.end(), code, both);
      }
      return out;
    }
    case ExprOp::Difference: {
      Matrix a = expr(*e.lhs);
      Matrix b = expr(*e.rhs);
      Matrix out{a.arity, {}};
      for (const auto& [code, node] : a.cells) {
        auto it = b.cells.find(code);
        NodeId keep = it == b.cells.end() ? node : circuit_.make_and(node, circuit_.make_not(it->second));
        if (keep != BoolCircuit::kFalse) out.cells.emplace_hint(out.cells.end(), code, keep);
      }
      return out;
    }
    case ExprOp::Transpose: {
      Matrix a = expr(*e.lhs);
      Matrix out{2, {}};
      for (const auto& [code, node] : a.cells) out.cells.emplace((code % base_) * base_ + code / base_, node);
      return out;
    }
    case ExprOp::Closure: return closure(expr(*e.lhs));
    case ExprOp::ReflexiveClosure: {
      Matrix out = closure(expr(*e.lhs));
      for (std::uint64_t a = 0; a < n; ++a) out.cells[a * base_ + a] = BoolCircuit::kTrue;
      return out;
    }
  }
  return Matrix{};
}

NodeId Grounder::formula(const Formula& f) {
  switch (f.op) {
    case FormulaOp::Quant: {
      Matrix bound = expr(*f.left);
      std::optional<rel::Atom> saved;
      if (auto it = env_.find(f.var); it != env_.end()) saved = it->second;
      std::vector<NodeId> parts;
      bool decided = false;
      for (const auto& [code, member] : bound.cells) {
        env_[f.var] = static_cast<rel::Atom>(code);
        NodeId body = formula(*f.a);
        NodeId part = BoolCircuit::kTrue;
        switch (f.quant) {
          case forl::Quantifier::All: part = circuit_.make_implies(member, body); break;
          case forl::Quantifier::Some: part = circuit_.make_and(member, body); break;
          case forl::Quantifier::No: part = circuit_.make_implies(member, circuit_.make_not(body)); break;
        }
        parts.push_back(part);
        // A FALSE conjunct (or TRUE disjunct) settles the whole quantifier.
        if (f.quant == forl::Quantifier::Some ? part == BoolCircuit::kTrue : part == BoolCircuit::kFalse) {
          decided = true;
          break;
        }
      }
      if (saved) {
        env_[f.var] = *saved;
      } else {
        env_.erase(f.var);
      }
      if (decided) return f.quant == forl::Quantifier::Some ? BoolCircuit::kTrue : BoolCircuit::kFalse;
      return f.quant == forl::Quantifier::Some ? circuit_.make_or(std::move(parts))
                                               : circuit_.make_and(std::move(parts));
    }
    case FormulaOp::In: return subset(expr(*f.left), expr(*f.right));
    case FormulaOp::Equal: {
      Matrix a = expr(*f.left);
      Matrix b = expr(*f.right);
      return circuit_.make_and(subset(a, b), subset(b, a));
    }
    case FormulaOp::Mult: return cardinality(f.mult, expr(*f.left));
    case FormulaOp::Not: return circuit_.make_not(formula(*f.a));
    case FormulaOp::And: {
      NodeId a = formula(*f.a);
      if (a == BoolCircuit::kFalse) return a;
      return circuit_.make_and(a, formula(*f.b));
    }
    case FormulaOp::Or: {
      NodeId a = formula(*f.a);
      if (a == BoolCircuit::kTrue) return a;
      return circuit_.make_or(a, formula(*f.b));
    }
    case FormulaOp::Implies: {
      NodeId a = formula(*f.a);
      if (a == BoolCircuit::kFalse) return BoolCircuit::kTrue;
      return circuit_.make_implies(a, formula(*f.b));
    }
    case FormulaOp::Iff: return circuit_.make_iff(formula(*f.a), formula(*f.b));
  }
  return BoolCircuit::kTrue;
}

Grounding ground(const std::vector<const forl::TypedFact*>& facts, const rel::Bounds& bounds) {
  Grounding g;
  g.vars = VarMap(bounds);
  Grounder grounder(g.circuit, g.vars, bounds);
  for (const forl::TypedFact* f : facts) g.fact_roots.push_back(grounder.formula(*f->formula));
  g.root = g.circuit.make_and(g.fact_roots);
  return g;
}

}  // namespace tracer::ground
