#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "tracer/horn_rules.hpp"

namespace tracer::forl {

namespace {

struct NotHorn {};

// Equalities are collected while translating and removed by unification.
struct Lit {
  enum class Kind { Rel, Univ, Neq, Eq };
  Kind kind;
  std::string relation;
  std::vector<int> vars;
};

using Body = std::vector<Lit>;
using Dnf = std::vector<Body>;

struct Draft {
  Body body;
  std::optional<Lit> head;
};

Dnf cross(const Dnf& a, const Dnf& b) {
  Dnf out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Body merged = x;
      merged.insert(merged.end(), y.begin(), y.end());
      out.push_back(std::move(merged));
    }
  }
  return out;
}

class Compiler {
 public:
  std::vector<Draft> drafts;

  void rules(const Formula& f, const Dnf& context, std::map<std::string, int> env) {
    switch (f.op) {
      case FormulaOp::Quant: {
        if (f.quant != Quantifier::All) throw NotHorn{};
        int v = fresh();
        Dnf bound = member({v}, *f.left, env);
        env[f.var] = v;
        rules(*f.a, cross(context, bound), env);
        return;
      }
      case FormulaOp::And:
        rules(*f.a, context, env);
        rules(*f.b, context, env);
        return;
      case FormulaOp::Implies:
        rules(*f.b, cross(context, dnf(*f.a, env)), env);
        return;
      case FormulaOp::Not:
        deny(cross(context, dnf(*f.a, env)));
        return;
      case FormulaOp::Mult: {
        if (f.mult != Mult::No) throw NotHorn{};
        deny(cross(context, member(fresh_tuple(f.left->arity), *f.left, env)));
        return;
      }
      case FormulaOp::In: {
        std::vector<int> t = fresh_tuple(f.left->arity);
        Dnf body = cross(context, member(t, *f.left, env));
        for (Lit& h : heads(t, *f.right, env)) {
          for (const Body& b : body) drafts.push_back({b, h});
        }
        return;
      }
      case FormulaOp::Equal: {
        auto in_one = make_compare(FormulaOp::In, f.left, f.right);
        auto in_two = make_compare(FormulaOp::In, f.right, f.left);
        rules(*in_one, context, env);
        rules(*in_two, context, env);
        return;
      }
      default: throw NotHorn{};
    }
  }

  int num_vars() const { return next_var_; }

 private:
  int next_var_ = 0;

  int fresh() { return next_var_++; }
  std::vector<int> fresh_tuple(int arity) {
    std::vector<int> t;
    for (int i = 0; i < arity; ++i) t.push_back(fresh());
    return t;
  }

  void deny(const Dnf& bodies) {
    for (const Body& b : bodies) drafts.push_back({b, std::nullopt});
  }

  // Body-position formula as a disjunction of conjunctions.
  Dnf dnf(const Formula& f, std::map<std::string, int> env) {
    switch (f.op) {
      case FormulaOp::In: {
        std::vector<int> t = fresh_tuple(f.left->arity);
        return cross(member(t, *f.left, env), member(t, *f.right, env));
      }
      case FormulaOp::And: return cross(dnf(*f.a, env), dnf(*f.b, env));
      case FormulaOp::Or: {
        Dnf out = dnf(*f.a, env);
        Dnf more = dnf(*f.b, env);
        out.insert(out.end(), more.begin(), more.end());
        return out;
      }
      case FormulaOp::Quant: {
        if (f.quant != Quantifier::Some) throw NotHorn{};
        int v = fresh();
        Dnf bound = member({v}, *f.left, env);
        env[f.var] = v;
        return cross(bound, dnf(*f.a, env));
      }
      case FormulaOp::Mult: {
        if (f.mult != Mult::Some) throw NotHorn{};
        return member(fresh_tuple(f.left->arity), *f.left, env);
      }
      case FormulaOp::Equal: {
        auto vars = var_pair(f, env);
        return {{Lit{Lit::Kind::Eq, {}, {vars.first, vars.second}}}};
      }
      case FormulaOp::Not: {
        if (f.a->op != FormulaOp::Equal) throw NotHorn{};
        auto vars = var_pair(*f.a, env);
        return {{Lit{Lit::Kind::Neq, {}, {vars.first, vars.second}}}};
      }
      default: throw NotHorn{};
    }
  }

  static std::pair<int, int> var_pair(const Formula& eq, const std::map<std::string, int>& env) {
    if (eq.left->op != ExprOp::VarRef || eq.right->op != ExprOp::VarRef) throw NotHorn{};
    return {env.at(eq.left->name), env.at(eq.right->name)};
  }

  Dnf member(const std::vector<int>& t, const Expr& e, const std::map<std::string, int>& env) {
    switch (e.op) {
      case ExprOp::SigRef:
      case ExprOp::FieldRef: return {{Lit{Lit::Kind::Rel, e.name, t}}};
      case ExprOp::VarRef: return {{Lit{Lit::Kind::Eq, {}, {t[0], env.at(e.name)}}}};
      case ExprOp::Univ: return {{Lit{Lit::Kind::Univ, {}, {t[0]}}}};
      case ExprOp::Iden: return {{Lit{Lit::Kind::Eq, {}, {t[0], t[1]}}}};
      case ExprOp::None: return {};
      case ExprOp::Join: {
        int z = fresh();
        std::size_t k1 = static_cast<std::size_t>(e.lhs->arity);
        std::vector<int> left(t.begin(), t.begin() + static_cast<long>(k1 - 1));
        left.push_back(z);
        std::vector<int> right{z};
        right.insert(right.end(), t.begin() + static_cast<long>(k1 - 1), t.end());
        return cross(member(left, *e.lhs, env), member(right, *e.rhs, env));
      }
      case ExprOp::Product: {
        std::size_t k1 = static_cast<std::size_t>(e.lhs->arity);
        std::vector<int> left(t.begin(), t.begin() + static_cast<long>(k1));
        std::vector<int> right(t.begin() + static_cast<long>(k1), t.end());
        return cross(member(left, *e.lhs, env), member(right, *e.rhs, env));
      }
      case ExprOp::Union: {
        Dnf out = member(t, *e.lhs, env);
        Dnf more = member(t, *e.rhs, env);
        out.insert(out.end(), more.begin(), more.end());
        return out;
      }
      case ExprOp::Intersect: return cross(member(t, *e.lhs, env), member(t, *e.rhs, env));
      case ExprOp::Transpose: return member({t[1], t[0]}, *e.lhs, env);
      default: throw NotHorn{};
    }
  }

  std::vector<Lit> heads(const std::vector<int>& t, const Expr& e, const std::map<std::string, int>& env) {
    switch (e.op) {
      case ExprOp::SigRef:
      case ExprOp::FieldRef: return {Lit{Lit::Kind::Rel, e.name, t}};
      case ExprOp::VarRef: return {Lit{Lit::Kind::Eq, {}, {t[0], env.at(e.name)}}};
      case ExprOp::Iden: return {Lit{Lit::Kind::Eq, {}, {t[0], t[1]}}};
      case ExprOp::Univ: return {};
      case ExprOp::Transpose: return heads({t[1], t[0]}, *e.lhs, env);
      case ExprOp::Product: {
        std::size_t k1 = static_cast<std::size_t>(e.lhs->arity);
        std::vector<int> left(t.begin(), t.begin() + static_cast<long>(k1));
        std::vector<int> right(t.begin() + static_cast<long>(k1), t.end());
        auto out = heads(left, *e.lhs, env);
        auto more = heads(right, *e.rhs, env);
        out.insert(out.end(), more.begin(), more.end());
        return out;
      }
      case ExprOp::Intersect: {
        auto out = heads(t, *e.lhs, env);
        auto more = heads(t, *e.rhs, env);
        out.insert(out.end(), more.begin(), more.end());
        return out;
      }
      default: throw NotHorn{};
    }
  }
};

int find(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

std::optional<HornRule> finish(const Draft& draft, int num_vars) {
  std::vector<int> parent(static_cast<std::size_t>(num_vars));
  std::iota(parent.begin(), parent.end(), 0);
  auto unite = [&](int a, int b) {
    a = find(parent, a);
    b = find(parent, b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const Lit& l : draft.body) {
    if (l.kind == Lit::Kind::Eq) unite(l.vars[0], l.vars[1]);
  }
  auto rename = [&](std::vector<int> vars) {
    for (int& v : vars) v = find(parent, v);
    return vars;
  };

  HornRule rule;
  std::vector<Lit> body;
  for (const Lit& l : draft.body) {
    if (l.kind == Lit::Kind::Eq) continue;
    Lit copy = l;
    copy.vars = rename(l.vars);
    if (copy.kind == Lit::Kind::Neq && copy.vars[0] == copy.vars[1]) return std::nullopt;  // body unsatisfiable
    body.push_back(std::move(copy));
  }
  std::optional<Lit> head = draft.head;
  if (head) {
    head->vars = rename(head->vars);
    if (head->kind == Lit::Kind::Eq) {
      if (head->vars[0] == head->vars[1]) return std::nullopt;  // tautology
      body.push_back(Lit{Lit::Kind::Neq, {}, head->vars});
      head.reset();
    }
  }

  // Dense renumbering in order of first occurrence.
  std::vector<int> dense(static_cast<std::size_t>(num_vars), -1);
  int next = 0;
  auto remap = [&](std::vector<int>& vars) {
    for (int& v : vars) {
      if (dense[static_cast<std::size_t>(v)] < 0) dense[static_cast<std::size_t>(v)] = next++;
      v = dense[static_cast<std::size_t>(v)];
    }
  };
  std::vector<HornAtom> atoms;
  for (Lit& l : body) {
    remap(l.vars);
    HornAtom a;
    a.kind = l.kind == Lit::Kind::Rel ? HornAtom::Kind::Rel
             : l.kind == Lit::Kind::Univ ? HornAtom::Kind::Univ
                                         : HornAtom::Kind::Neq;
    a.relation = l.relation;
    a.vars = l.vars;
    if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(std::move(a));
  }
  if (head) {
    remap(head->vars);
    rule.head = HornAtom{HornAtom::Kind::Rel, head->relation, head->vars};
  }
  rule.num_vars = next;

  // Range restriction: variables only mentioned by Neq or the head range over univ.
  std::vector<bool> bound(static_cast<std::size_t>(next), false);
  for (const auto& a : atoms) {
    if (a.kind == HornAtom::Kind::Neq) continue;
    for (int v : a.vars) bound[static_cast<std::size_t>(v)] = true;
  }
  for (int v = 0; v < next; ++v) {
    if (!bound[static_cast<std::size_t>(v)]) atoms.push_back(HornAtom{HornAtom::Kind::Univ, {}, {v}});
  }
  // Relational atoms first so that matching binds variables before checks.
  std::stable_partition(atoms.begin(), atoms.end(),
                        [](const HornAtom& a) { return a.kind != HornAtom::Kind::Neq; });
  rule.body = std::move(atoms);
  return rule;
}

}  // namespace

std::optional<std::vector<HornRule>> compile_horn(const Formula& resolved) {
  Compiler compiler;
  try {
    compiler.rules(resolved, Dnf{Body{}}, {});
  } catch (const NotHorn&) {
    return std::nullopt;
  }
  std::vector<HornRule> out;
  for (const Draft& d : compiler.drafts) {
    if (auto rule = finish(d, compiler.num_vars())) out.push_back(std::move(*rule));
  }
  return out;
}

std::string to_string(const HornRule& rule) {
  std::ostringstream out;
  auto atom = [&](const HornAtom& a) {
    switch (a.kind) {
      case HornAtom::Kind::Rel: out << a.relation; break;
      case HornAtom::Kind::Univ: out << "univ"; break;
      case HornAtom::Kind::Neq: out << "neq"; break;
    }
    out << '(';
    for (std::size_t i = 0; i < a.vars.size(); ++i) out << (i ? "," : "") << 'v' << a.vars[i];
    out << ')';
  };
  if (rule.head) {
    atom(*rule.head);
  } else {
    out << "false";
  }
  out << " :- ";
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (i) out << ", ";
    atom(rule.body[i]);
  }
  return out.str();
}

}  // namespace tracer::forl
