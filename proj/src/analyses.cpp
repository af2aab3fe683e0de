#include "tracer/analyses.hpp"

#include <algorithm>
#include <chrono>

#include "datalog.hpp"
#include "tracer/error.hpp"
#include "tracer/grounder.hpp"

namespace tracer::analysis {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "Consistent";
    case Verdict::Inconsistent: return "Inconsistent";
    case Verdict::Solutions: return "Solutions";
  }
  return "Consistent";
}

std::vector<const forl::TypedFact*> consistency_facts(const forl::TypedSpec& spec) {
  std::vector<const forl::TypedFact*> out;
  for (const auto& f : spec.facts) {
    if (!f.annotated()) out.push_back(&f);
  }
  return out;
}

std::vector<const forl::TypedFact*> inference_facts(const forl::TypedSpec& spec,
                                                    const std::vector<std::string>& targets) {
  std::vector<const forl::TypedFact*> out;
  for (const auto& f : spec.facts) {
    if (!f.annotated() || f.targets_any(targets)) out.push_back(&f);
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct LazyRule {
  const forl::TypedFact* fact;
  forl::HornRule rule;
};

std::vector<std::string> atom_names(const rel::Tuple& t, const rel::Universe& u) {
  std::vector<std::string> out;
  for (rel::Atom a : t) out.push_back(u.name(a));
  return out;
}

void add_all(sat::Solver& solver, const sat::CnfFormula& cnf, std::size_t& counter) {
  solver.ensure_vars(cnf.num_vars());
  for (std::size_t i = 0; i < cnf.num_clauses(); ++i) solver.add_clause(cnf.clause(i));
  counter += cnf.num_clauses();
}

// Indices of a subset-minimal unsatisfiable subset of `facts`, or empty when
// the facts are jointly satisfiable. Each fact is guarded by a selector.
std::vector<std::size_t> unsat_core(const std::vector<const forl::TypedFact*>& facts, const rel::Bounds& bounds,
                                    const sat::SolverConfig& config) {
  ground::Grounding g = ground::ground(facts, bounds);
  ground::TseitinEncoder encoder(g.circuit, g.vars.num_vars());
  sat::CnfFormula cnf;
  cnf.set_num_vars(g.vars.num_vars());
  std::vector<sat::Lit> roots(facts.size(), 0);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (!g.circuit.is_constant(g.fact_roots[i])) roots[i] = encoder.literal(g.fact_roots[i], true, cnf);
  }
  int next = std::max(cnf.num_vars(), encoder.num_vars());
  std::vector<sat::Lit> selector(facts.size(), 0);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (g.fact_roots[i] == ground::BoolCircuit::kTrue) continue;
    selector[i] = ++next;
    if (g.fact_roots[i] == ground::BoolCircuit::kFalse) {
      cnf.add_clause({-selector[i]});
    } else {
      cnf.add_clause({-selector[i], roots[i]});
    }
  }
  cnf.set_num_vars(next);
  sat::Solver solver(config);
  std::size_t ignored = 0;
  add_all(solver, cnf, ignored);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (selector[i]) active.push_back(i);
  }
  auto solve_with = [&](const std::vector<std::size_t>& set, std::vector<std::size_t>* core) {
    std::vector<sat::Lit> assumptions;
    for (std::size_t i : set) assumptions.push_back(selector[i]);
    sat::SolveResult r = solver.solve(assumptions);
    if (!r.sat() && core) {
      core->clear();
      for (std::size_t pos : r.core) core->push_back(set[pos]);
      std::sort(core->begin(), core->end());
    }
    return r.sat();
  };
  std::vector<std::size_t> core;
  if (solve_with(active, &core)) return {};
  // Deletion pass. Members already found necessary stay in every smaller
  // core, and cores are sorted, so position k is where testing resumes.
  for (std::size_t k = 0; k < core.size();) {
    std::vector<std::size_t> trial = core;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<std::size_t> smaller;
    if (!solve_with(trial, &smaller)) {
      core = std::move(smaller);
    } else {
      ++k;
    }
  }
  return core;
}

std::vector<std::string> fact_names(const std::vector<const forl::TypedFact*>& facts,
                                    const std::vector<std::size_t>& indices) {
  std::vector<std::string> out;
  for (std::size_t i : indices) out.push_back(facts[i]->name);
  return out;
}

}  // namespace

// Incremental search for subset-minimal models with respect to the projection
// variables. Eager facts are grounded up front; lazy Horn rules are
// instantiated only for ground instances a candidate model violates.
class ModelSearch {
 public:
  ModelSearch(rel::Bounds bounds, const std::vector<const forl::TypedFact*>& eager, std::vector<LazyRule> lazy,
              const std::vector<std::string>& projected_relations, const sat::SolverConfig& config)
      : bounds_(std::move(bounds)),
        vars_(bounds_),
        encoder_(circuit_, vars_.num_vars()),
        solver_(config),
        lazy_(std::move(lazy)) {
    for (const auto& r : bounds_.order) {
      if (std::find(projected_relations.begin(), projected_relations.end(), r) == projected_relations.end()) continue;
      for (int v : vars_.vars_of(r)) projection_.push_back(v);
    }
    std::sort(projection_.begin(), projection_.end());
    ground::Grounder grounder(circuit_, vars_, bounds_);
    std::vector<ground::NodeId> roots;
    for (const forl::TypedFact* f : eager) roots.push_back(grounder.formula(*f->formula));
    sat::CnfFormula cnf;
    cnf.set_num_vars(vars_.num_vars());
    encoder_.assert_node(circuit_.make_and(roots), cnf);
    cnf.set_num_vars(std::max(cnf.num_vars(), encoder_.num_vars()));
    add_all(solver_, cnf, clauses_);
  }

  const rel::Bounds& bounds() const noexcept { return bounds_; }
  const ground::VarMap& vars() const noexcept { return vars_; }
  const std::vector<int>& projection() const noexcept { return projection_; }

  Stats stats() const {
    Stats s;
    s.vars = solver_.num_vars();
    s.clauses = clauses_;
    s.refinements = refinements_;
    return s;
  }

  std::optional<std::vector<bool>> next() {
    if (exhausted_) return std::nullopt;
    auto model = solve_checked({});
    if (!model) {
      exhausted_ = true;
      return std::nullopt;
    }
    for (;;) {
      std::vector<sat::Lit> chosen;
      std::vector<sat::Lit> assumptions;
      for (int p : projection_) {
        if (model->value(p)) {
          chosen.push_back(p);
        } else {
          assumptions.push_back(-p);
        }
      }
      if (chosen.empty()) break;
      // act -> some currently true projected tuple becomes false.
      int act = solver_.new_var();
      std::vector<sat::Lit> shrink{-act};
      for (int p : chosen) shrink.push_back(-p);
      solver_.add_clause(shrink);
      ++clauses_;
      assumptions.push_back(act);
      auto smaller = solve_checked(assumptions);
      solver_.add_clause({-act});
      ++clauses_;
      if (!smaller) break;
      model = std::move(smaller);
    }
    std::vector<sat::Lit> block;
    for (int p : projection_) {
      if (model->value(p)) block.push_back(-p);
    }
    if (block.empty()) {
      exhausted_ = true;
    } else {
      solver_.add_clause(block);
      ++clauses_;
    }
    return model->assignment;
  }

 private:
  std::optional<sat::SolveResult> solve_checked(const std::vector<sat::Lit>& assumptions) {
    for (;;) {
      sat::SolveResult r = solver_.solve(assumptions);
      if (!r.sat()) return std::nullopt;
      if (!refine(r.assignment)) return r;
      ++refinements_;
    }
  }

  // Adds one clause per violated ground instance of a lazy rule; false when
  // the model satisfies every rule.
  bool refine(const std::vector<bool>& assignment) {
    if (lazy_.empty()) return false;
    const rel::Valuation model = vars_.decode(bounds_, assignment);
    detail::Store store(model);
    std::vector<std::vector<sat::Lit>> pending;
    for (const LazyRule& lr : lazy_) {
      const forl::HornRule& rule = lr.rule;
      detail::match(rule, store, nullptr, -1, bounds_.universe.size(), [&](const detail::Binding& b) {
        std::vector<sat::Lit> clause;
        if (rule.head) {
          rel::Tuple t = detail::instantiate(*rule.head, b);
          if (model.at(rule.head->relation).contains(t)) return;
          if (int v = vars_.find(rule.head->relation, t)) clause.push_back(v);
        }
        for (const forl::HornAtom& atom : rule.body) {
          if (atom.kind != forl::HornAtom::Kind::Rel) continue;
          if (int v = vars_.find(atom.relation, detail::instantiate(atom, b))) clause.push_back(-v);
        }
        pending.push_back(std::move(clause));
      });
    }
    for (const auto& c : pending) solver_.add_clause(c);
    clauses_ += pending.size();
    return !pending.empty();
  }

  rel::Bounds bounds_;
  ground::BoolCircuit circuit_;
  ground::VarMap vars_;
  ground::TseitinEncoder encoder_;
  sat::Solver solver_;
  std::vector<LazyRule> lazy_;
  std::vector<int> projection_;
  std::size_t clauses_ = 0;
  int refinements_ = 0;
  bool exhausted_ = false;
};

SolutionIterator::SolutionIterator() = default;
SolutionIterator::SolutionIterator(std::unique_ptr<ModelSearch> search,
                                   std::function<Solution(const std::vector<bool>&)> decode)
    : search_(std::move(search)), decode_(std::move(decode)) {}
SolutionIterator::~SolutionIterator() = default;
SolutionIterator::SolutionIterator(SolutionIterator&&) noexcept = default;
SolutionIterator& SolutionIterator::operator=(SolutionIterator&&) noexcept = default;

std::optional<Solution> SolutionIterator::next() {
  if (!search_) return std::nullopt;
  auto model = search_->next();
  if (!model) {
    search_.reset();
    return std::nullopt;
  }
  return decode_(*model);
}

AnalysisReport check_consistency(const forl::TypedSpec& spec, const rel::Instance& instance,
                                 const sat::SolverConfig& config) {
  const auto start = Clock::now();
  AnalysisReport report;
  report.mode = "consistency";
  const auto facts = consistency_facts(spec);
  const rel::Bounds bounds = rel::build_bounds(rel::BoundsMode::consistency(), spec, instance);
  ground::Grounding g = ground::ground(facts, bounds);
  sat::CnfFormula cnf = ground::to_cnf(g.circuit, g.root, g.vars.num_vars());
  report.stats.vars = cnf.num_vars();
  report.stats.clauses = cnf.num_clauses();
  if (sat::solve(cnf, {}, config).sat()) {
    report.verdict = Verdict::Consistent;
    report.stats.ms = elapsed_ms(start);
    return report;
  }
  report.verdict = Verdict::Inconsistent;

  // Facts the instance falsifies outright, plus a minimal conflicting fact set
  // of the completion problem in which the fields they mention may grow.
  std::vector<char> flagged(facts.size(), 0);
  std::vector<std::string> targets;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (g.fact_roots[i] != ground::BoolCircuit::kFalse) continue;
    flagged[i] = 1;
    for (const auto& name : detail::mentioned_relations(*facts[i]->formula)) {
      const forl::Relation* r = spec.relation(name);
      if (r && !r->is_sig && std::find(targets.begin(), targets.end(), name) == targets.end()) {
        targets.push_back(name);
      }
    }
  }
  if (!targets.empty()) {
    const rel::Bounds completion = rel::build_bounds(rel::BoundsMode::infer(targets), spec, instance);
    for (std::size_t i : unsat_core(facts, completion, config)) flagged[i] = 1;
  }
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (flagged[i]) report.violated.push_back(facts[i]->name);
  }
  report.stats.ms = elapsed_ms(start);
  return report;
}

namespace {

Solution decode_inferred(const ModelSearch& search, const std::vector<bool>& assignment) {
  Solution s;
  for (int p : search.projection()) {
    if (!assignment[static_cast<std::size_t>(p)]) continue;
    const auto& [relation, tuple] = search.vars().tuple_of(p);
    s.inferred.push_back({relation, atom_names(tuple, search.bounds().universe), "RL"});
  }
  return s;
}

[[noreturn]] void inconsistent_premises(const std::vector<const forl::TypedFact*>& facts, const rel::Bounds& bounds,
                                        const sat::SolverConfig& config) {
  std::string message = "inference impossible: the premises are inconsistent";
  auto core = unsat_core(facts, bounds, config);
  if (!core.empty()) {
    message += "; conflicting facts:";
    for (const auto& n : fact_names(facts, core)) message += " " + n;
  }
  throw Error(ErrorKind::InconsistentPremises, message);
}

}  // namespace

AnalysisReport infer_relations(const forl::TypedSpec& spec, const rel::Instance& instance,
                               const std::vector<std::string>& targets, const InferOptions& options) {
  const auto start = Clock::now();
  AnalysisReport report;
  report.mode = "infer";
  report.verdict = Verdict::Solutions;
  rel::Bounds bounds = rel::build_bounds(rel::BoundsMode::infer(targets), spec, instance);
  const auto facts = inference_facts(spec, targets);

  if (options.engine == Engine::Horn) {
    auto fixpoint = horn_fixpoint(spec, instance, targets);
    for (const auto& r : bounds.order) {
      auto it = fixpoint.find(r);
      if (it == fixpoint.end()) continue;
      for (const rel::Tuple& t : it->second) {
        if (!bounds.at(r).lower.contains(t)) report.inferred.push_back({r, atom_names(t, bounds.universe), "RL"});
      }
    }
    report.solutions = std::make_shared<SolutionIterator>();
    report.stats.ms = elapsed_ms(start);
    return report;
  }

  std::vector<const forl::TypedFact*> eager;
  std::vector<LazyRule> lazy;
  for (const forl::TypedFact* f : facts) {
    std::optional<std::vector<forl::HornRule>> rules;
    if (options.grounding == Grounding::Lazy) rules = forl::compile_horn(*f->formula);
    if (!rules) {
      eager.push_back(f);
      continue;
    }
    for (auto& r : *rules) lazy.push_back({f, std::move(r)});
  }
  auto search = std::make_unique<ModelSearch>(bounds, eager, std::move(lazy), targets, options.solver);
  auto first = search->next();
  if (!first) inconsistent_premises(facts, bounds, options.solver);
  const ModelSearch* view = search.get();
  Solution solution = decode_inferred(*view, *first);
  report.inferred = std::move(solution.inferred);
  report.stats = search->stats();
  report.solutions = std::make_shared<SolutionIterator>(
      std::move(search), [view](const std::vector<bool>& m) { return decode_inferred(*view, m); });
  report.stats.ms = elapsed_ms(start);
  return report;
}

namespace {

Solution decode_discovery(const ModelSearch& search, const forl::TypedSpec& spec, const std::vector<bool>& assignment) {
  Solution s;
  const rel::Bounds& bounds = search.bounds();
  const rel::Valuation model = search.vars().decode(bounds, assignment);
  for (rel::Atom a = 0; a < bounds.universe.size(); ++a) {
    if (!rel::is_fresh_atom(bounds.universe.name(a))) continue;
    Suggestion suggestion;
    suggestion.atom = bounds.universe.name(a);
    std::vector<std::string> member;
    for (const auto& sig : spec.sigs) {
      if (model.at(sig.name).contains({a})) member.push_back(sig.name);
    }
    for (const auto& sig : member) {
      bool has_more_specific = std::any_of(member.begin(), member.end(), [&](const std::string& other) {
        return other != sig && spec.is_subsig(other, sig);
      });
      if (!has_more_specific) suggestion.sigs.push_back(sig);
    }
    for (const auto& r : spec.relations) {
      if (r.is_sig) continue;
      for (const rel::Tuple& t : model.at(r.name)) {
        if (std::find(t.begin(), t.end(), a) != t.end()) {
          suggestion.links.push_back({r.name, atom_names(t, bounds.universe), "RL"});
        }
      }
    }
    if (!suggestion.sigs.empty() || !suggestion.links.empty()) s.suggestions.push_back(std::move(suggestion));
  }
  return s;
}

}  // namespace

AnalysisReport discover_locations(const forl::TypedSpec& spec, const rel::Instance& instance, int fresh_count,
                                  bool link_fresh, const sat::SolverConfig& config) {
  const auto start = Clock::now();
  AnalysisReport report;
  report.mode = "discover";
  report.verdict = Verdict::Solutions;
  rel::Bounds bounds = rel::build_bounds(rel::BoundsMode::discover(fresh_count, link_fresh), spec, instance);
  std::vector<std::string> all_relations = bounds.order;
  auto search =
      std::make_unique<ModelSearch>(std::move(bounds), consistency_facts(spec), std::vector<LazyRule>{}, all_relations,
                                    config);
  auto first = search->next();
  if (!first) {
    throw Error(ErrorKind::NoSuggestion, "no extension with " + std::to_string(fresh_count) +
                                             " fresh location(s) satisfies the specification");
  }
  const ModelSearch* view = search.get();
  report.suggestions = decode_discovery(*view, spec, *first).suggestions;
  report.stats = search->stats();
  report.solutions = std::make_shared<SolutionIterator>(
      std::move(search), [view, &spec](const std::vector<bool>& m) { return decode_discovery(*view, spec, m); });
  report.stats.ms = elapsed_ms(start);
  return report;
}

AcceptResult accept_trace(const trace::TraceabilityInformation& info, const forl::TypedSpec& spec,
                          const std::string& relation, const std::vector<std::string>& tuple,
                          trace::Provenance provenance) {
  const forl::Relation* r = spec.relation(relation);
  if (!r || r->is_sig) throw Error(ErrorKind::TypeViolation, "'" + relation + "' is not a declared field");
  if (static_cast<int>(tuple.size()) != r->arity()) {
    throw Error(ErrorKind::TypeViolation, "'" + relation + "' expects " + std::to_string(r->arity()) + " atoms");
  }
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    auto it = info.types.find(tuple[i]);
    if (it == info.types.end()) throw Error(ErrorKind::TypeViolation, "'" + tuple[i] + "' has no type");
    if (!spec.is_subsig(it->second, r->columns[i])) {
      throw Error(ErrorKind::TypeViolation, "'" + tuple[i] + "' of type " + it->second + " does not fit column " +
                                                r->columns[i] + " of '" + relation + "'");
    }
  }
  if (auto existing = info.find_link(relation, tuple)) return {info, *existing, true};
  std::string id = relation;
  for (const auto& a : tuple) id += "-" + a;
  for (int k = 2; info.links.count(id) || info.locations.count(id); ++k) id = relation + "-" + std::to_string(k);
  trace::TraceLink link{id, tuple, relation, provenance};
  return {trace::add_link(info, std::move(link)), id, false};
}

}  // namespace tracer::analysis
