#pragma once

// Reference implementations and random generators shared by the unit suites
// and the acceptance binary.

#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "support.hpp"
#include "tracer/analyses.hpp"
#include "tracer/grounder.hpp"
#include "tracer/relational.hpp"
#include "tracer/sat.hpp"

namespace tracer::testing {

// ---- propositional ---------------------------------------------------------

using Clauses = std::vector<std::vector<sat::Lit>>;

// Plain recursive DPLL with unit propagation; `values` is 1-based, 0 = unset.
inline bool dpll(const Clauses& clauses, std::vector<int> values) {
  for (;;) {
    bool changed = false;
    for (const auto& c : clauses) {
      int unassigned = 0;
      sat::Lit last = 0;
      bool satisfied = false;
      for (sat::Lit l : c) {
        int v = values[sat::var_of(l)];
        if (v == 0) {
          ++unassigned;
          last = l;
        } else if ((v > 0) == (l > 0)) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) continue;
      if (unassigned == 0) return false;
      if (unassigned == 1) {
        values[sat::var_of(last)] = last > 0 ? 1 : -1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (std::size_t v = 1; v < values.size(); ++v) {
    if (values[v] != 0) continue;
    for (int sign : {1, -1}) {
      auto next = values;
      next[v] = sign;
      if (dpll(clauses, next)) return true;
    }
    return false;
  }
  return true;
}

inline bool satisfies(const Clauses& clauses, const sat::SolveResult& r) {
  for (const auto& c : clauses) {
    bool ok = false;
    for (sat::Lit l : c) ok = ok || r.value_of_lit(l);
    if (!ok) return false;
  }
  return true;
}

inline sat::CnfFormula to_formula(const Clauses& clauses, int vars) {
  sat::CnfFormula f;
  f.set_num_vars(vars);
  for (const auto& c : clauses) f.add_clause(c);
  return f;
}

inline Clauses random_clauses(std::mt19937& rng, int vars, int count) {
  std::uniform_int_distribution<int> var(1, vars);
  std::uniform_int_distribution<int> len(1, 4);
  std::bernoulli_distribution neg(0.5);
  Clauses out;
  for (int i = 0; i < count; ++i) {
    std::vector<sat::Lit> c;
    int n = len(rng);
    for (int k = 0; k < n; ++k) c.push_back(neg(rng) ? -var(rng) : var(rng));
    out.push_back(std::move(c));
  }
  return out;
}

// Random formula with 1..20 variables and up to five clauses per variable.
inline std::pair<Clauses, int> random_cnf(std::mt19937& rng) {
  int vars = 1 + static_cast<int>(rng() % 20);
  int count = static_cast<int>(rng() % (vars * 5 + 1));
  return {random_clauses(rng, vars, count), vars};
}

// var(i, j): pigeon i sits in hole j.
inline sat::CnfFormula pigeonhole(int pigeons, int holes) {
  sat::CnfFormula f;
  auto v = [&](int i, int j) { return i * holes + j + 1; };
  f.set_num_vars(pigeons * holes);
  for (int i = 0; i < pigeons; ++i) {
    std::vector<sat::Lit> c;
    for (int j = 0; j < holes; ++j) c.push_back(v(i, j));
    f.add_clause(c);
  }
  for (int j = 0; j < holes; ++j) {
    for (int a = 0; a < pigeons; ++a) {
      for (int b = a + 1; b < pigeons; ++b) f.add_clause({-v(a, j), -v(b, j)});
    }
  }
  return f;
}

// ---- relational ------------------------------------------------------------

inline constexpr const char* kTwoRelationSig = "sig A { r: set A, s: set A }\n";

// Random well-typed formulas over `sig A { r: set A, s: set A }`.
class FormulaGen {
 public:
  explicit FormulaGen(std::mt19937& rng) : rng_(rng) {}

  std::string formula(int depth) {
    int choice = depth <= 0 ? pick(4) : pick(12);
    switch (choice) {
      case 0: {
        int arity = 1 + pick(2);
        return "(" + expr(arity, depth - 1) + " in " + expr(arity, depth - 1) + ")";
      }
      case 1: {
        int arity = 1 + pick(2);
        return "(" + expr(arity, depth - 1) + (pick(2) ? " = " : " != ") + expr(arity, depth - 1) + ")";
      }
      case 2:
      case 3: {
        static const char* mults[] = {"some", "no", "lone", "one"};
        return std::string("(") + mults[pick(4)] + " " + expr(1 + pick(2), depth - 1) + ")";
      }
      case 4: return "(not " + formula(depth - 1) + ")";
      case 5: return "(" + formula(depth - 1) + " and " + formula(depth - 1) + ")";
      case 6: return "(" + formula(depth - 1) + " or " + formula(depth - 1) + ")";
      case 7: return "(" + formula(depth - 1) + " implies " + formula(depth - 1) + ")";
      case 8: return "(" + formula(depth - 1) + " iff " + formula(depth - 1) + ")";
      default: {
        static const char* quants[] = {"all", "some", "no"};
        std::string v = "x" + std::to_string(next_var_++);
        std::string bound = pick(3) == 0 ? expr(1, 0) : "A";
        bound_.push_back(v);
        std::string body = formula(depth - 1);
        bound_.pop_back();
        return std::string("(") + quants[pick(3)] + " " + v + ": " + bound + " | " + body + ")";
      }
    }
  }

  std::string expr(int arity, int depth) {
    if (arity == 1) {
      if (depth <= 0 || pick(3) == 0) {
        if (!bound_.empty() && pick(2)) return bound_[static_cast<std::size_t>(pick(static_cast<int>(bound_.size())))];
        static const char* leaves[] = {"A", "univ", "(r.A)", "(A.r)", "(s.A)", "(A.s)"};
        return leaves[pick(6)];
      }
      switch (pick(5)) {
        case 0: return "(" + expr(1, depth - 1) + " + " + expr(1, depth - 1) + ")";
        case 1: return "(" + expr(1, depth - 1) + " & " + expr(1, depth - 1) + ")";
        case 2: return "(" + expr(1, depth - 1) + " - " + expr(1, depth - 1) + ")";
        case 3: return "(" + expr(1, depth - 1) + "." + expr(2, depth - 1) + ")";
        default: return "(" + expr(2, depth - 1) + "." + expr(1, depth - 1) + ")";
      }
    }
    if (depth <= 0 || pick(3) == 0) {
      static const char* leaves[] = {"r", "s", "r", "s", "iden"};
      return leaves[pick(5)];
    }
    switch (pick(9)) {
      case 0: return "~" + expr(2, depth - 1);
      case 1: return "^" + expr(2, depth - 1);
      case 2: return "*" + expr(2, depth - 1);
      case 3: return "(" + expr(2, depth - 1) + " + " + expr(2, depth - 1) + ")";
      case 4: return "(" + expr(2, depth - 1) + " & " + expr(2, depth - 1) + ")";
      case 5: return "(" + expr(2, depth - 1) + " - " + expr(2, depth - 1) + ")";
      case 6: return "(" + expr(2, depth - 1) + "." + expr(2, depth - 1) + ")";
      default: return "(" + expr(1, depth - 1) + "->" + expr(1, depth - 1) + ")";
    }
  }

 private:
  int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

  std::mt19937& rng_;
  std::vector<std::string> bound_;
  int next_var_ = 0;
};

// A is exact; each tuple of r and s is excluded, fixed, or free, with at most
// `max_free` free tuples overall.
inline rel::Bounds random_bounds(std::mt19937& rng, int atoms, int max_free) {
  rel::Bounds b;
  std::vector<std::string> names;
  for (int i = 0; i < atoms; ++i) names.push_back("a" + std::to_string(i));
  b.universe = rel::Universe(names);
  b.order = {"A", "r", "s"};
  std::vector<rel::Atom> all(static_cast<std::size_t>(atoms));
  std::iota(all.begin(), all.end(), 0);
  b.relations["A"] = {rel::TupleSet::unary(all), rel::TupleSet::unary(all)};
  int free = 0;
  for (const char* name : {"r", "s"}) {
    rel::RelationBounds rb{rel::TupleSet(2), rel::TupleSet(2)};
    for (const auto& t : rel::TupleSet::all(static_cast<std::size_t>(atoms), 2)) {
      switch (rng() % 3) {
        case 0: break;
        case 1:
          rb.lower.insert(t);
          rb.upper.insert(t);
          break;
        default:
          if (free < max_free) {
            rb.upper.insert(t);
            ++free;
          }
      }
    }
    b.relations[name] = rb;
  }
  return b;
}

using ModelSet = std::set<std::vector<bool>>;

inline std::vector<const forl::TypedFact*> all_facts(const forl::TypedSpec& spec) {
  std::vector<const forl::TypedFact*> out;
  for (const auto& f : spec.facts) out.push_back(&f);
  return out;
}

// Models of the grounded facts projected onto the tuple variables.
inline ModelSet sat_models(const std::vector<const forl::TypedFact*>& facts, const rel::Bounds& bounds) {
  ground::Grounding g = ground::ground(facts, bounds);
  sat::CnfFormula cnf = ground::to_cnf(g.circuit, g.root, g.vars.num_vars());
  std::vector<sat::Var> projection(static_cast<std::size_t>(g.vars.num_vars()));
  std::iota(projection.begin(), projection.end(), 1);
  ModelSet out;
  for (auto& m : sat::enumerate(cnf, projection, std::size_t{1} << 20)) out.insert(std::move(m));
  return out;
}

// Every assignment of the tuple variables, evaluated directly on relations.
inline ModelSet brute_models(const std::vector<const forl::TypedFact*>& facts, const rel::Bounds& bounds) {
  ground::VarMap vars(bounds);
  int k = vars.num_vars();
  ModelSet out;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::vector<bool> assignment(static_cast<std::size_t>(k) + 1, false);
    std::vector<bool> projected(static_cast<std::size_t>(k), false);
    for (int v = 1; v <= k; ++v) {
      bool bit = (mask >> (v - 1)) & 1u;
      assignment[static_cast<std::size_t>(v)] = bit;
      projected[static_cast<std::size_t>(v - 1)] = bit;
    }
    rel::Valuation val = vars.decode(bounds, assignment);
    bool all = true;
    for (const auto* f : facts) all = all && rel::eval_formula(*f->formula, val, bounds.universe);
    if (all) out.insert(projected);
  }
  return out;
}

// ---- traceability ----------------------------------------------------------

using Edge = std::tuple<std::string, int, int>;

// Locations n0..n{n-1} typed Requirement, one manual link per edge.
inline trace::TraceabilityInformation digraph(int n, const std::vector<Edge>& edges) {
  trace::TraceabilityInformation info;
  for (int i = 0; i < n; ++i) {
    std::string id = "n" + std::to_string(i);
    info.locations[id] = {id, trace::FileRef{id + ".md"}, std::nullopt};
    info.types[id] = "Requirement";
  }
  for (const auto& [rel, a, b] : edges) {
    std::string id = rel + "-" + std::to_string(a) + "-" + std::to_string(b);
    info.links[id] = {id, {"n" + std::to_string(a), "n" + std::to_string(b)}, rel, trace::Provenance::Manual};
  }
  return info;
}

// sidp.forl restricted to its signatures and the two cycle facts.
inline const forl::TypedSpec& cycle_spec() {
  static const forl::TypedSpec spec = [] {
    std::string text = data("sidp.forl");
    std::string sigs_end = "sig Specification extends Artifact {}\n";
    std::string head = text.substr(0, text.find(sigs_end) + sigs_end.size());
    return forl::load_spec(head + text.substr(text.find("fact irreflexive")));
  }();
  return spec;
}

struct CycleCase {
  trace::TraceabilityInformation info;
  std::vector<std::string> expected;  // facts a direct graph check says are violated
};

// Random digraph on at most five nodes over contains, requires and refines.
inline CycleCase random_cycle_case(std::mt19937& rng) {
  static const char* relations[] = {"contains", "requires", "refines"};
  int n = 1 + static_cast<int>(rng() % 5);
  std::set<Edge> edges;
  int count = static_cast<int>(rng() % 7);
  for (int k = 0; k < count; ++k) {
    edges.emplace(relations[rng() % 3], static_cast<int>(rng() % static_cast<unsigned>(n)),
                  static_cast<int>(rng() % static_cast<unsigned>(n)));
  }
  bool self_loop = false;
  bool two_cycle = false;
  for (const auto& [rel, a, b] : edges) {
    self_loop = self_loop || a == b;
    two_cycle = two_cycle || (a != b && edges.count({rel, b, a}));
  }
  CycleCase out{digraph(n, {edges.begin(), edges.end()}), {}};
  if (self_loop) out.expected.push_back("irreflexive");
  if (two_cycle) out.expected.push_back("antisymmetric");
  return out;
}

// 123 artifacts and 102 acyclic traces: contains from ten parents into
// distinct leaves, forward refines/requires, and five symmetric conflicts.
inline trace::TraceabilityInformation scale_workspace(std::mt19937& rng) {
  const int n = 123;
  std::set<Edge> edges;
  for (int k = 0; k < 12; ++k) edges.emplace("contains", k % 10, 100 + k);
  while (edges.size() < 92) {
    int a = static_cast<int>(rng() % 100);
    int b = static_cast<int>(rng() % 100);
    if (a >= b) continue;
    edges.emplace(rng() % 2 ? "refines" : "requires", a, b);
  }
  while (edges.size() < 102) {
    int a = static_cast<int>(rng() % n);
    int b = static_cast<int>(rng() % n);
    if (a == b || edges.count({"conflicts", a, b})) continue;
    edges.emplace("conflicts", a, b);
    edges.emplace("conflicts", b, a);
  }
  return digraph(n, {edges.begin(), edges.end()});
}

inline std::set<analysis::InferredTuple> as_set(const std::vector<analysis::InferredTuple>& v) {
  return {v.begin(), v.end()};
}

// Tuples the semi-naive Horn fixpoint adds to the instance.
inline std::set<analysis::InferredTuple> fixpoint_delta(const forl::TypedSpec& spec, const rel::Instance& inst,
                                                        const std::vector<std::string>& targets) {
  std::set<analysis::InferredTuple> out;
  for (const auto& [name, tuples] : analysis::horn_fixpoint(spec, inst, targets)) {
    for (const rel::Tuple& t : tuples) {
      if (inst.value(name).contains(t)) continue;
      std::vector<std::string> atoms;
      for (rel::Atom a : t) atoms.push_back(inst.universe.name(a));
      out.insert({name, atoms, "RL"});
    }
  }
  return out;
}

// ---- description logic -----------------------------------------------------

struct SubsumptionCase {
  const char* ontology;
  const char* sup;
  const char* sub;
  bool holds;
};

inline constexpr const char* kEmptyTBox = "";
inline constexpr const char* kHierarchy = "SubObjectPropertyOf(r s)";
inline constexpr const char* kFunctional = "FunctionalObjectProperty(f)";
inline constexpr const char* kInverseFunctional = "FunctionalObjectProperty(inv(f))";
inline constexpr const char* kHierFunctional = "SubObjectPropertyOf(r f)\nFunctionalObjectProperty(f)";
inline constexpr const char* kChain = "SubClassOf(A B)\nSubClassOf(B C)\nDisjointClasses(C D)";
inline constexpr const char* kComplexLeft = "SubClassOf(some(r A) B)";
inline constexpr const char* kCyclic = "SubClassOf(A some(r A))";

// Each entry was checked by hand: a positive case by deriving sub ⊓ ¬sup ⊑ ⊥,
// a negative case by a finite countermodel.
inline const std::vector<SubsumptionCase>& subsumption_cases() {
  static const std::vector<SubsumptionCase> cases = {
      {kEmptyTBox, "A", "and(A B)", true},
      {kEmptyTBox, "or(A B)", "A", true},
      {kEmptyTBox, "and(A B)", "A", false},  // {x: A}
      {kEmptyTBox, "some(r A)", "some(r and(A B))", true},
      {kEmptyTBox, "some(r and(A B))", "some(r A)", false},  // x -r-> y: A
      {kEmptyTBox, "all(r or(A B))", "all(r A)", true},
      {kEmptyTBox, "some(r and(A B))", "and(all(r A) some(r B))", true},
      {kEmptyTBox, "some(r and(A B))", "and(some(r A) some(r B))", false},  // two distinct successors
      {kEmptyTBox, "all(r some(inv(r) A))", "A", true},
      {kEmptyTBox, "A", "some(r all(inv(r) A))", true},
      {kEmptyTBox, "A", "bottom", true},
      {kEmptyTBox, "top", "A", true},
      {kEmptyTBox, "or(A not(A))", "top", true},
      {kEmptyTBox, "bottom", "and(A not(A))", true},
      {kEmptyTBox, "not(some(r top))", "all(r bottom)", true},
      {kEmptyTBox, "some(r A)", "some(r top)", false},  // x -r-> y with y not A
      {kEmptyTBox, "some(r not(A))", "not(all(r A))", true},
      {kEmptyTBox, "B", "A", false},
      {kHierarchy, "some(s A)", "some(r A)", true},
      {kHierarchy, "some(r A)", "some(s A)", false},  // x -s-> y only
      {kHierarchy, "all(r A)", "all(s A)", true},
      {kHierarchy, "some(inv(s) A)", "some(inv(r) A)", true},
      {kFunctional, "some(f and(A B))", "and(some(f A) some(f B))", true},
      {kFunctional, "bottom", "and(some(f A) some(f not(A)))", true},
      {kInverseFunctional, "some(inv(f) and(A B))", "and(some(inv(f) A) some(inv(f) B))", true},
      {kInverseFunctional, "some(f and(A B))", "and(some(f A) some(f B))", false},  // f itself is not functional
      {kHierFunctional, "some(f and(A B))", "and(some(r A) some(f B))", true},
      {kChain, "C", "A", true},
      {kChain, "bottom", "and(A D)", true},
      {kChain, "A", "C", false},  // {x: B, C}
      {kComplexLeft, "B", "some(r and(A E))", true},
      {kCyclic, "some(r some(r A))", "A", true},
      {kCyclic, "B", "A", false},  // infinite r-chain of A, folded by blocking
  };
  return cases;
}

}  // namespace tracer::testing
