#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "tracer/forl.hpp"
#include "tracer/horn_rules.hpp"

namespace tracer::forl {

bool TypedFact::targets_any(const std::vector<std::string>& relations) const {
  if (!reason) return false;
  for (const auto& r : *reason) {
    if (std::find(relations.begin(), relations.end(), r) != relations.end()) return true;
  }
  return false;
}

const SigInfo* TypedSpec::sig(std::string_view name) const {
  for (const auto& s : sigs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Relation* TypedSpec::relation(std::string_view name) const {
  for (const auto& r : relations) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const TypedFact* TypedSpec::fact(std::string_view name) const {
  for (const auto& f : facts) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool TypedSpec::is_subsig(std::string_view sub, std::string_view sup) const {
  if (sub == sup || sup == "univ") return true;
  const SigInfo* s = sig(sub);
  if (!s) return false;
  for (const auto& p : s->parents) {
    if (is_subsig(p, sup)) return true;
  }
  return false;
}

namespace {

// The extends-sigs whose union contains `name`: the sig itself unless it is a
// subset sig, in which case the union over its parents.
void extends_cover(const TypedSpec& spec, std::string_view name, std::set<std::string>& out) {
  const SigInfo* s = spec.sig(name);
  if (!s) return;
  if (s->kind != SigKind::SubsetOf) {
    out.insert(s->name);
    return;
  }
  for (const auto& p : s->parents) extends_cover(spec, p, out);
}

}  // namespace

bool TypedSpec::overlaps(std::string_view a, std::string_view b) const {
  if (a == "univ" || b == "univ") return true;
  if (is_subsig(a, b) || is_subsig(b, a)) return true;
  std::set<std::string> ca;
  std::set<std::string> cb;
  extends_cover(*this, a, ca);
  extends_cover(*this, b, cb);
  // Extends-sigs are disjoint unless one lies below the other.
  for (const auto& x : ca) {
    for (const auto& y : cb) {
      if (is_subsig(x, y) || is_subsig(y, x)) return true;
    }
  }
  return false;
}

std::vector<std::string> TypedSpec::concrete_descendants(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto& s : sigs) {
    if (!s.is_abstract && is_subsig(s.name, name)) out.push_back(s.name);
  }
  return out;
}

std::vector<std::string> TypedSpec::field_names() const {
  std::vector<std::string> out;
  for (const auto& r : relations) {
    if (!r.is_sig) out.push_back(r.name);
  }
  return out;
}

namespace {

class Checker {
 public:
  explicit Checker(TypedSpec& spec) : spec_(spec) {}

  std::vector<Diagnostic> errors;

  void error(Span at, const std::string& message, ErrorKind kind) {
    errors.push_back({Diagnostic::Severity::Error, at.line, at.col, message});
    if (!first_kind_) first_kind_ = kind;
  }
  void warning(Span at, const std::string& message) {
    spec_.warnings.push_back({Diagnostic::Severity::Warning, at.line, at.col, message});
  }
  ErrorKind kind() const { return first_kind_.value_or(ErrorKind::UnknownName); }

  void declare() {
    std::set<std::string> names;
    for (const SigDecl& d : spec_.ast.sigs) {
      if (!names.insert(d.name).second) {
        error(d.span, "duplicate signature '" + d.name + "'", ErrorKind::DuplicateName);
        continue;
      }
      SigInfo info;
      info.name = d.name;
      info.is_abstract = d.is_abstract;
      info.kind = d.kind;
      info.parents = d.parents;
      info.span = d.span;
      spec_.sigs.push_back(std::move(info));
    }
    for (SigInfo& s : spec_.sigs) {
      for (const auto& p : s.parents) {
        if (!spec_.sig(p)) error(s.span, "unknown parent signature '" + p + "'", ErrorKind::UnknownName);
      }
      if (s.kind == SigKind::SubsetOf && s.is_abstract) {
        error(s.span, "subset signature '" + s.name + "' cannot be abstract", ErrorKind::UnknownName);
      }
    }
    // Cycle detection over the parent relation.
    for (const SigInfo& s : spec_.sigs) {
      std::set<std::string> seen{s.name};
      std::vector<std::string> stack(s.parents.begin(), s.parents.end());
      while (!stack.empty()) {
        std::string p = stack.back();
        stack.pop_back();
        if (p == s.name) {
          error(s.span, "signature '" + s.name + "' is its own ancestor", ErrorKind::UnknownName);
          break;
        }
        if (!seen.insert(p).second) continue;
        if (const SigInfo* ps = spec_.sig(p)) stack.insert(stack.end(), ps->parents.begin(), ps->parents.end());
      }
    }
    if (!errors.empty()) return;
    for (SigInfo& s : spec_.sigs) {
      if (s.kind != SigKind::Extends) continue;
      for (SigInfo& p : spec_.sigs) {
        if (p.name == s.parents[0]) p.children.push_back(s.name);
      }
    }
    for (const SigInfo& s : spec_.sigs) {
      Relation r;
      r.name = s.name;
      r.is_sig = true;
      r.columns = {s.name};
      r.span = s.span;
      spec_.relations.push_back(std::move(r));
    }
    for (const SigDecl& d : spec_.ast.sigs) {
      for (const FieldDecl& f : d.fields) {
        if (!names.insert(f.name).second) {
          error(f.span, "duplicate name '" + f.name + "' (field names are global)", ErrorKind::DuplicateName);
          continue;
        }
        for (std::size_t i = 1; i < f.columns.size(); ++i) {
          if (!spec_.sig(f.columns[i])) {
            error(f.span, "unknown signature '" + f.columns[i] + "' in field '" + f.name + "'",
                  ErrorKind::UnknownName);
          }
        }
        Relation r;
        r.name = f.name;
        r.columns = f.columns;
        r.m = f.m;
        r.n = f.n;
        r.span = f.span;
        spec_.relations.push_back(std::move(r));
      }
    }
  }

  void facts() {
    std::set<std::string> fact_names;
    for (const FactDecl& d : spec_.ast.facts) {
      TypedFact fact;
      fact.name = d.name.empty() ? "fact@" + std::to_string(d.span.line) : d.name;
      if (!fact_names.insert(fact.name).second) {
        error(d.span, "duplicate fact name '" + fact.name + "'", ErrorKind::DuplicateName);
      }
      fact.reason = d.reason;
      fact.span = d.span;
      if (d.reason) {
        for (const auto& t : *d.reason) {
          const Relation* r = spec_.relation(t);
          if (!r || r->is_sig) {
            error(d.span, "Reason@ target '" + t + "' is not a declared field", ErrorKind::UnknownReasonTarget);
          }
        }
      }
      fact.formula = conjunction(d.body, d.span);
      add_fact(std::move(fact));
    }
  }

  void implicit_facts() {
    std::vector<TypedFact> out;
    auto sig_ref = [](const std::string& n) { return make_name(n); };
    auto add = [&](std::string name, FormulaPtr f, Span at) {
      TypedFact fact;
      fact.name = std::move(name);
      fact.implicit = true;
      fact.formula = std::move(f);
      fact.span = at;
      out.push_back(std::move(fact));
    };
    std::vector<std::string> top_level;
    for (const SigInfo& s : spec_.sigs) {
      if (s.kind == SigKind::TopLevel) top_level.push_back(s.name);
      if (s.kind == SigKind::Extends) {
        add("$extends_" + s.name, make_compare(FormulaOp::In, sig_ref(s.name), sig_ref(s.parents[0])), s.span);
      }
      if (s.kind == SigKind::SubsetOf) {
        ExprPtr parents = sig_ref(s.parents[0]);
        for (std::size_t i = 1; i < s.parents.size(); ++i) {
          parents = make_binary(ExprOp::Union, parents, sig_ref(s.parents[i]));
        }
        add("$subset_" + s.name, make_compare(FormulaOp::In, sig_ref(s.name), parents), s.span);
      }
    }
    auto disjoint = [&](const std::vector<std::string>& group, Span at) {
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = i + 1; j < group.size(); ++j) {
          add("$disjoint_" + group[i] + "_" + group[j],
              make_mult(Mult::No, make_binary(ExprOp::Intersect, sig_ref(group[i]), sig_ref(group[j]))), at);
        }
      }
    };
    disjoint(top_level, {});
    for (const SigInfo& s : spec_.sigs) {
      disjoint(s.children, s.span);
      if (!s.is_abstract) continue;
      if (s.children.empty()) {
        add("$abstract_" + s.name, make_mult(Mult::No, sig_ref(s.name)), s.span);
      } else {
        ExprPtr all = sig_ref(s.children[0]);
        for (std::size_t i = 1; i < s.children.size(); ++i) {
          all = make_binary(ExprOp::Union, all, sig_ref(s.children[i]));
        }
        add("$abstract_" + s.name, make_compare(FormulaOp::In, sig_ref(s.name), all), s.span);
      }
    }
    for (const Relation& r : spec_.relations) {
      if (r.is_sig) continue;
      ExprPtr product = sig_ref(r.columns[0]);
      for (std::size_t i = 1; i < r.columns.size(); ++i) {
        product = make_binary(ExprOp::Product, product, sig_ref(r.columns[i]));
      }
      add("$type_" + r.name, make_compare(FormulaOp::In, sig_ref(r.name), product), r.span);
      if (r.arity() == 2 && r.n != Mult::Set) {
        auto var = make_name("$a");
        auto image = make_binary(ExprOp::Join, var, sig_ref(r.name));
        add("$mult_" + r.name, make_quant(Quantifier::All, "$a", sig_ref(r.columns[0]), make_mult(r.n, image)),
            r.span);
      }
    }
    for (auto& f : out) add_fact(std::move(f));
  }

 private:
  TypedSpec& spec_;
  std::optional<ErrorKind> first_kind_;

  FormulaPtr conjunction(const std::vector<FormulaPtr>& body, Span at) {
    if (body.empty()) {
      // The empty conjunction: `no none`.
      return make_mult(Mult::No, make_constant(ExprOp::None, at), at);
    }
    FormulaPtr acc = body[0];
    for (std::size_t i = 1; i < body.size(); ++i) acc = make_binary(FormulaOp::And, acc, body[i], at);
    return acc;
  }

  void add_fact(TypedFact fact) {
    std::size_t before = errors.size();
    std::map<std::string, Type> env;
    fact.formula = resolve(*fact.formula, env);
    if (errors.size() == before) {
      if (auto rules = compile_horn(*fact.formula)) {
        bool definite = std::any_of(rules->begin(), rules->end(), [](const HornRule& r) { return r.head.has_value(); });
        fact.horn = definite ? HornKind::Definite : HornKind::Denial;
      }
    }
    spec_.facts.push_back(std::move(fact));
  }

  // ---- types -----------------------------------------------------------

  static void push_unique(Type& t, std::vector<std::string> product) {
    if (std::find(t.products.begin(), t.products.end(), product) == t.products.end()) {
      t.products.push_back(std::move(product));
    }
  }

  Type join_type(const Type& a, const Type& b) const {
    Type out;
    for (const auto& p : a.products) {
      for (const auto& q : b.products) {
        if (!spec_.overlaps(p.back(), q.front())) continue;
        std::vector<std::string> r(p.begin(), p.end() - 1);
        r.insert(r.end(), q.begin() + 1, q.end());
        push_unique(out, std::move(r));
      }
    }
    return out;
  }

  std::string meet(const std::string& a, const std::string& b) const {
    if (a == "univ") return b;
    if (b == "univ") return a;
    if (spec_.is_subsig(a, b)) return a;
    if (spec_.is_subsig(b, a)) return b;
    return a;
  }

  ExprPtr resolve(const Expr& e, const std::map<std::string, Type>& env) {
    auto out = std::make_shared<Expr>(e);
    auto fail_arity = [&](const std::string& message) {
      error(e.span, message, ErrorKind::ArityError);
      out->arity = std::max(out->arity, 1);
    };
    switch (e.op) {
      case ExprOp::Name:
      case ExprOp::SigRef:
      case ExprOp::FieldRef:
      case ExprOp::VarRef: {
        if (auto it = env.find(e.name); it != env.end()) {
          out->op = ExprOp::VarRef;
          out->arity = 1;
          out->type = it->second;
        } else if (const Relation* r = spec_.relation(e.name)) {
          out->op = r->is_sig ? ExprOp::SigRef : ExprOp::FieldRef;
          out->arity = r->arity();
          out->type.products = {r->columns};
        } else {
          error(e.span, "unknown name '" + e.name + "'", ErrorKind::UnknownName);
          out->arity = 1;
        }
        return out;
      }
      case ExprOp::Univ:
        out->arity = 1;
        out->type.products = {{"univ"}};
        return out;
      case ExprOp::Iden:
        out->arity = 2;
        out->type.products = {{"univ", "univ"}};
        return out;
      case ExprOp::None:
        out->arity = 1;
        return out;
      default: break;
    }
    ExprPtr l = resolve(*e.lhs, env);
    ExprPtr r = e.rhs ? resolve(*e.rhs, env) : nullptr;
    out->lhs = l;
    out->rhs = r;
    switch (e.op) {
      case ExprOp::Join:
        out->arity = l->arity + r->arity - 2;
        if (out->arity < 1) {
          fail_arity("join of two unary expressions has arity 0");
          break;
        }
        out->type = join_type(l->type, r->type);
        if (out->type.empty() && !l->type.empty() && !r->type.empty()) {
          warning(e.span, "join '" + print_expr(*out) + "' is always empty");
        }
        break;
      case ExprOp::Product:
        out->arity = l->arity + r->arity;
        for (const auto& p : l->type.products) {
          for (const auto& q : r->type.products) {
            std::vector<std::string> cols = p;
            cols.insert(cols.end(), q.begin(), q.end());
            push_unique(out->type, std::move(cols));
          }
        }
        break;
      case ExprOp::Union:
      case ExprOp::Intersect:
      case ExprOp::Difference:
        out->arity = l->arity;
        if (l->arity != r->arity) {
          fail_arity("operands have arities " + std::to_string(l->arity) + " and " + std::to_string(r->arity));
          break;
        }
        if (e.op == ExprOp::Union) {
          out->type = l->type;
          for (const auto& q : r->type.products) push_unique(out->type, q);
        } else if (e.op == ExprOp::Difference) {
          out->type = l->type;
        } else {
          for (const auto& p : l->type.products) {
            for (const auto& q : r->type.products) {
              bool ok = true;
              std::vector<std::string> cols;
              for (std::size_t i = 0; i < p.size() && ok; ++i) {
                ok = spec_.overlaps(p[i], q[i]);
                cols.push_back(meet(p[i], q[i]));
              }
              if (ok) push_unique(out->type, std::move(cols));
            }
          }
        }
        break;
      case ExprOp::Transpose:
        out->arity = 2;
        if (l->arity != 2) {
          fail_arity("transpose requires a binary operand, found arity " + std::to_string(l->arity));
          break;
        }
        for (const auto& p : l->type.products) push_unique(out->type, {p[1], p[0]});
        break;
      case ExprOp::Closure:
      case ExprOp::ReflexiveClosure: {
        out->arity = 2;
        if (l->arity != 2) {
          error(e.span, "closure requires a binary operand, found arity " + std::to_string(l->arity),
                ErrorKind::NonBinaryClosure);
          break;
        }
        Type acc = l->type;
        if (join_type(acc, l->type).empty() && !acc.empty()) {
          warning(e.span, "closure of '" + print_expr(*l) + "' equals the relation: its columns never overlap");
        }
        for (;;) {
          std::size_t before = acc.products.size();
          for (const auto& p : join_type(acc, l->type).products) push_unique(acc, p);
          if (acc.products.size() == before) break;
        }
        if (e.op == ExprOp::ReflexiveClosure) push_unique(acc, {"univ", "univ"});
        out->type = std::move(acc);
        break;
      }
      default: break;
    }
    return out;
  }

  FormulaPtr resolve(const Formula& f, const std::map<std::string, Type>& env) {
    auto out = std::make_shared<Formula>(f);
    switch (f.op) {
      case FormulaOp::Quant: {
        ExprPtr bound = resolve(*f.left, env);
        if (bound->arity != 1) {
          error(f.left->span, "quantifier bound must be unary, found arity " + std::to_string(bound->arity),
                ErrorKind::ArityError);
        }
        out->left = bound;
        auto inner = env;
        inner[f.var] = bound->type;
        out->a = resolve(*f.a, inner);
        break;
      }
      case FormulaOp::In:
      case FormulaOp::Equal: {
        out->left = resolve(*f.left, env);
        out->right = resolve(*f.right, env);
        if (out->left->arity != out->right->arity) {
          error(f.span,
                "comparison of arities " + std::to_string(out->left->arity) + " and " +
                    std::to_string(out->right->arity),
                ErrorKind::ArityError);
        }
        break;
      }
      case FormulaOp::Mult: out->left = resolve(*f.left, env); break;
      case FormulaOp::Not: out->a = resolve(*f.a, env); break;
      default:
        out->a = resolve(*f.a, env);
        out->b = resolve(*f.b, env);
        break;
    }
    return out;
  }
};

}  // namespace

TypedSpec typecheck(SpecAst ast) {
  TypedSpec spec;
  spec.ast = std::move(ast);
  Checker checker(spec);
  checker.declare();
  if (checker.errors.empty()) {
    checker.facts();
    checker.implicit_facts();
  }
  if (!checker.errors.empty()) throw TypeError(checker.kind(), checker.errors);
  return spec;
}

TypedSpec load_spec(std::string_view text) { return typecheck(parse_spec(text)); }

}  // namespace tracer::forl
