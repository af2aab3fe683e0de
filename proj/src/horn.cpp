#include <algorithm>

#include "datalog.hpp"
#include "tracer/analyses.hpp"
#include "tracer/error.hpp"

namespace tracer::analysis {

namespace detail {

const rel::TupleSet* Store::get(std::string_view relation) const {
  auto it = values_.find(relation);
  return it == values_.end() ? nullptr : &it->second;
}

std::size_t Store::size(std::string_view relation) const {
  const rel::TupleSet* s = get(relation);
  return s ? s->size() : 0;
}

const std::vector<const rel::Tuple*>& Store::lookup(std::string_view relation, std::size_t col,
                                                    rel::Atom atom) const {
  static const std::vector<const rel::Tuple*> kNone;
  auto key = std::make_pair(std::string(relation), col);
  auto it = indexes_.find(key);
  if (it == indexes_.end()) {
    Index index;
    if (const rel::TupleSet* s = get(relation)) {
      for (const rel::Tuple& t : *s) index[t[col]].push_back(&t);
    }
    it = indexes_.emplace(std::move(key), std::move(index)).first;
  }
  auto jt = it->second.find(atom);
  return jt == it->second.end() ? kNone : jt->second;
}

rel::Tuple instantiate(const forl::HornAtom& atom, const Binding& binding) {
  rel::Tuple t;
  t.reserve(atom.vars.size());
  for (int v : atom.vars) t.push_back(binding[static_cast<std::size_t>(v)]);
  return t;
}

namespace {

using Kind = forl::HornAtom::Kind;

class Matcher {
 public:
  Matcher(const forl::HornRule& rule, const Store& full, const Store* delta, int delta_atom, std::size_t universe,
          const std::function<void(const Binding&)>& emit)
      : rule_(rule),
        full_(full),
        delta_(delta),
        delta_atom_(delta_atom),
        universe_(universe),
        emit_(emit),
        binding_(static_cast<std::size_t>(rule.num_vars), 0),
        bound_(static_cast<std::size_t>(rule.num_vars), 0) {
    plan();
  }

  void run() { step(0); }

 private:
  const Store& store_for(int i) const { return i == delta_atom_ ? *delta_ : full_; }

  // Greedy join order: the delta atom first, then the Rel atom sharing the
  // most bound variables (smaller relations first on ties), then Univ atoms.
  // Neq atoms are placed as soon as both of their variables are bound.
  void plan() {
    const auto& body = rule_.body;
    std::vector<char> bound(bound_.size(), 0);
    std::vector<char> used(body.size(), 0);
    auto bind_all = [&](int i) {
      used[static_cast<std::size_t>(i)] = 1;
      order_.push_back(i);
      for (int v : body[static_cast<std::size_t>(i)].vars) bound[static_cast<std::size_t>(v)] = 1;
      for (std::size_t j = 0; j < body.size(); ++j) {
        if (used[j] || body[j].kind != Kind::Neq) continue;
        if (bound[static_cast<std::size_t>(body[j].vars[0])] && bound[static_cast<std::size_t>(body[j].vars[1])]) {
          used[j] = 1;
          order_.push_back(static_cast<int>(j));
        }
      }
    };
    if (delta_atom_ >= 0) bind_all(delta_atom_);
    for (;;) {
      int best = -1;
      std::size_t best_shared = 0;
      std::size_t best_size = 0;
      for (std::size_t j = 0; j < body.size(); ++j) {
        if (used[j] || body[j].kind != Kind::Rel) continue;
        std::size_t shared = 0;
        for (int v : body[j].vars) shared += bound[static_cast<std::size_t>(v)];
        std::size_t size = store_for(static_cast<int>(j)).size(body[j].relation);
        if (best < 0 || shared > best_shared || (shared == best_shared && size < best_size)) {
          best = static_cast<int>(j);
          best_shared = shared;
          best_size = size;
        }
      }
      if (best < 0) break;
      bind_all(best);
    }
    for (std::size_t j = 0; j < body.size(); ++j) {
      if (!used[j] && body[j].kind == Kind::Univ) bind_all(static_cast<int>(j));
    }
    for (std::size_t j = 0; j < body.size(); ++j) {
      if (!used[j]) order_.push_back(static_cast<int>(j));
    }
  }

  void step(std::size_t k) {
    if (k == order_.size()) {
      emit_(binding_);
      return;
    }
    const int index = order_[k];
    const forl::HornAtom& atom = rule_.body[static_cast<std::size_t>(index)];
    switch (atom.kind) {
      case Kind::Neq:
        if (binding_[static_cast<std::size_t>(atom.vars[0])] != binding_[static_cast<std::size_t>(atom.vars[1])]) {
          step(k + 1);
        }
        return;
      case Kind::Univ: {
        auto v = static_cast<std::size_t>(atom.vars[0]);
        if (bound_[v]) {
          step(k + 1);
          return;
        }
        bound_[v] = 1;
        for (rel::Atom a = 0; a < universe_; ++a) {
          binding_[v] = a;
          step(k + 1);
        }
        bound_[v] = 0;
        return;
      }
      case Kind::Rel: break;
    }
    const Store& store = store_for(index);
    const rel::TupleSet* all = store.get(atom.relation);
    if (!all) return;
    auto try_tuple = [&](const rel::Tuple& t) {
      std::size_t newly[8];
      std::size_t count = 0;
      bool ok = true;
      for (std::size_t c = 0; c < t.size() && ok; ++c) {
        auto v = static_cast<std::size_t>(atom.vars[c]);
        if (bound_[v]) {
          ok = binding_[v] == t[c];
        } else {
          bound_[v] = 1;
          binding_[v] = t[c];
          if (count < 8) newly[count++] = v;
        }
      }
      if (ok) step(k + 1);
      for (std::size_t i = 0; i < count; ++i) bound_[newly[i]] = 0;
    };
    for (std::size_t c = 0; c < atom.vars.size(); ++c) {
      auto v = static_cast<std::size_t>(atom.vars[c]);
      if (!bound_[v]) continue;
      for (const rel::Tuple* t : store.lookup(atom.relation, c, binding_[v])) try_tuple(*t);
      return;
    }
    for (const rel::Tuple& t : *all) try_tuple(t);
  }

  const forl::HornRule& rule_;
  const Store& full_;
  const Store* delta_;
  int delta_atom_;
  std::size_t universe_;
  const std::function<void(const Binding&)>& emit_;
  Binding binding_;
  std::vector<char> bound_;
  std::vector<int> order_;
};

void collect(const forl::Expr& e, std::set<std::string, std::less<>>& out) {
  switch (e.op) {
    case forl::ExprOp::Name:
    case forl::ExprOp::SigRef:
    case forl::ExprOp::FieldRef: out.insert(e.name); break;
    default: break;
  }
  if (e.lhs) collect(*e.lhs, out);
  if (e.rhs) collect(*e.rhs, out);
}

void collect(const forl::Formula& f, std::set<std::string, std::less<>>& out) {
  if (f.left) collect(*f.left, out);
  if (f.right) collect(*f.right, out);
  if (f.a) collect(*f.a, out);
  if (f.b) collect(*f.b, out);
}

}  // namespace

void match(const forl::HornRule& rule, const Store& full, const Store* delta, int delta_atom,
           std::size_t universe_size, const std::function<void(const Binding&)>& emit) {
  if (rule.body.size() > 0 && delta_atom >= 0 && !delta) return;
  for (const auto& a : rule.body) {
    if (a.kind == Kind::Rel && a.vars.size() > 8) {
      throw Error(ErrorKind::InvalidArgument, "relations of arity above 8 are not supported by the fixpoint engine");
    }
  }
  Matcher(rule, full, delta, delta_atom, universe_size, emit).run();
}

std::set<std::string, std::less<>> mentioned_relations(const forl::Formula& f) {
  std::set<std::string, std::less<>> out;
  collect(f, out);
  return out;
}

}  // namespace detail

std::map<std::string, rel::TupleSet, std::less<>> horn_fixpoint(const forl::TypedSpec& spec,
                                                                const rel::Instance& instance,
                                                                const std::vector<std::string>& targets) {
  const rel::Bounds bounds = rel::build_bounds(rel::BoundsMode::infer(targets), spec, instance);
  struct Named {
    const forl::TypedFact* fact;
    forl::HornRule rule;
  };
  std::vector<Named> rules;
  for (const forl::TypedFact* f : inference_facts(spec, targets)) {
    if (auto compiled = forl::compile_horn(*f->formula)) {
      for (auto& r : *compiled) rules.push_back({f, std::move(r)});
      continue;
    }
    auto mentioned = detail::mentioned_relations(*f->formula);
    bool touches = std::any_of(targets.begin(), targets.end(), [&](const std::string& t) { return mentioned.count(t); });
    if (touches) throw Error(ErrorKind::NonHornFact, "fact '" + f->name + "' is not Horn-shaped");
    if (!rel::eval_formula(*f->formula, bounds.lower_valuation(), bounds.universe)) {
      throw Error(ErrorKind::InconsistentPremises, "fact '" + f->name + "' is violated by the instance");
    }
  }

  rel::Valuation full = bounds.lower_valuation();
  rel::Valuation delta = full;
  const std::size_t n = bounds.universe.size();
  for (bool first = true;; first = false) {
    bool any = std::any_of(delta.begin(), delta.end(), [](const auto& kv) { return !kv.second.empty(); });
    if (!any && !first) break;
    rel::Valuation next;
    {
      detail::Store full_store(full);
      detail::Store delta_store(delta);
      for (const Named& named : rules) {
        auto emit = [&](const detail::Binding& b) {
          if (!named.rule.head) {
            throw Error(ErrorKind::InconsistentPremises, "fact '" + named.fact->name + "' is violated");
          }
          const forl::HornAtom& head = *named.rule.head;
          rel::Tuple t = detail::instantiate(head, b);
          if (full.at(head.relation).contains(t)) return;
          auto [it, fresh] = next.try_emplace(head.relation, rel::TupleSet(static_cast<int>(t.size())));
          it->second.insert(t);
          if (!bounds.at(head.relation).upper.contains(t)) {
            throw Error(ErrorKind::InconsistentPremises, "fact '" + named.fact->name + "' derives " + head.relation +
                                                             rel::format_tuple(t, bounds.universe) +
                                                             " outside its bounds");
          }
        };
        bool has_rel = false;
        for (std::size_t i = 0; i < named.rule.body.size(); ++i) {
          if (named.rule.body[i].kind != forl::HornAtom::Kind::Rel) continue;
          has_rel = true;
          detail::match(named.rule, full_store, &delta_store, static_cast<int>(i), n, emit);
        }
        if (!has_rel && first) detail::match(named.rule, full_store, nullptr, -1, n, emit);
      }
    }
    if (next.empty()) break;
    for (auto& [name, tuples] : next) {
      for (const rel::Tuple& t : tuples) full.at(name).insert(t);
    }
    delta = std::move(next);
  }

  std::map<std::string, rel::TupleSet, std::less<>> out;
  for (const auto& t : targets) out.emplace(t, full.at(t));
  return out;
}

}  // namespace tracer::analysis
