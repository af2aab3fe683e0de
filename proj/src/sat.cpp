#include "tracer/sat.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <cstring>

#include "tracer/error.hpp"

namespace tracer::sat {

void CnfFormula::add_clause(std::span<const Lit> lits) {
  starts_.push_back(literals_.size());
  for (Lit l : lits) {
    num_vars_ = std::max(num_vars_, var_of(l));
    literals_.push_back(l);
  }
}

std::span<const Lit> CnfFormula::clause(std::size_t i) const {
  std::size_t begin = starts_[i];
  std::size_t end = i + 1 < starts_.size() ? starts_[i + 1] : literals_.size();
  return {literals_.data() + begin, end - begin};
}

SolverConfig SolverConfig::from_environment() { return from_environment(SolverConfig{}); }

SolverConfig SolverConfig::from_environment(SolverConfig base) {
  if (const char* value = std::getenv("TRACER_SAT_CONFLICT_LIMIT")) {
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end != value && *end == '\0') base.conflict_limit = parsed;
  }
  return base;
}

namespace {

// Internal literal code: 2 * var + sign, var 0-based.
using ILit = std::uint32_t;
constexpr ILit kNoLit = 0xffffffffu;
constexpr std::uint32_t kNoClause = 0xffffffffu;

inline ILit make_lit(int var, bool negated) { return static_cast<ILit>(2 * var + (negated ? 1 : 0)); }
inline ILit neg(ILit l) { return l ^ 1u; }
inline int lit_var(ILit l) { return static_cast<int>(l >> 1); }
inline bool lit_sign(ILit l) { return (l & 1u) != 0; }

inline ILit from_dimacs(Lit l) { return l > 0 ? make_lit(l - 1, false) : make_lit(-l - 1, true); }
inline Lit to_dimacs(ILit l) { return lit_sign(l) ? -(lit_var(l) + 1) : lit_var(l) + 1; }

constexpr std::int8_t kTrue = 1;
constexpr std::int8_t kFalse = -1;
constexpr std::int8_t kUndef = 0;

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    seq++;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  double result = 1.0;
  for (int i = 0; i < seq; ++i) result *= y;
  return result;
}

}  // namespace

struct Solver::Impl {
  // Clause arena layout: [header][activity][lits...]; header = size | flags.
  static constexpr std::uint32_t kLearntBit = 1u << 31;
  static constexpr std::uint32_t kDeletedBit = 1u << 30;
  static constexpr std::uint32_t kSizeMask = kDeletedBit - 1;

  struct Watcher {
    std::uint32_t cref;
    ILit blocker;
  };

  SolverConfig cfg;
  SolverStats stats;
  bool ok = true;

  std::vector<std::uint32_t> arena;
  std::size_t wasted = 0;
  std::vector<std::uint32_t> problem_clauses;
  std::vector<std::uint32_t> learnt_clauses;
  std::vector<std::vector<Watcher>> watches;

  std::vector<std::int8_t> assigns;
  std::vector<int> level;
  std::vector<std::uint32_t> reason;
  std::vector<char> saved_phase;
  std::vector<ILit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;

  std::vector<double> activity;
  double var_inc = 1.0;
  double cla_inc = 1.0;
  std::vector<int> heap;
  std::vector<int> heap_index;

  std::vector<char> seen;
  std::vector<ILit> assumptions;
  std::vector<ILit> conflict_core;
  double max_learnts = 0;

  std::chrono::steady_clock::time_point started;
  std::uint64_t conflicts_at_start = 0;

  explicit Impl(SolverConfig c) : cfg(c) {}

  // ---- clause arena ----------------------------------------------------
  std::uint32_t size_of(std::uint32_t cref) const { return arena[cref] & kSizeMask; }
  bool learnt(std::uint32_t cref) const { return (arena[cref] & kLearntBit) != 0; }
  bool deleted(std::uint32_t cref) const { return (arena[cref] & kDeletedBit) != 0; }
  ILit* lits(std::uint32_t cref) { return reinterpret_cast<ILit*>(&arena[cref + 2]); }
  const ILit* lits(std::uint32_t cref) const { return reinterpret_cast<const ILit*>(&arena[cref + 2]); }
  float& act(std::uint32_t cref) { return *reinterpret_cast<float*>(&arena[cref + 1]); }

  std::uint32_t alloc(const std::vector<ILit>& ls, bool is_learnt) {
    auto cref = static_cast<std::uint32_t>(arena.size());
    arena.push_back(static_cast<std::uint32_t>(ls.size()) | (is_learnt ? kLearntBit : 0u));
    arena.push_back(std::bit_cast<std::uint32_t>(0.0f));
    for (ILit l : ls) arena.push_back(l);
    return cref;
  }

  void attach(std::uint32_t cref) {
    const ILit* c = lits(cref);
    watches[neg(c[0])].push_back({cref, c[1]});
    watches[neg(c[1])].push_back({cref, c[0]});
  }

  // ---- assignment ------------------------------------------------------
  int num_vars() const { return static_cast<int>(assigns.size()); }
  std::int8_t value(ILit l) const {
    std::int8_t v = assigns[lit_var(l)];
    return lit_sign(l) ? static_cast<std::int8_t>(-v) : v;
  }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  void enqueue(ILit l, std::uint32_t from) {
    int v = lit_var(l);
    assigns[v] = lit_sign(l) ? kFalse : kTrue;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  void new_var() {
    int v = num_vars();
    assigns.push_back(kUndef);
    level.push_back(0);
    reason.push_back(kNoClause);
    saved_phase.push_back(cfg.default_polarity ? 1 : 0);
    activity.push_back(0.0);
    seen.push_back(0);
    heap_index.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
  }

  void cancel_until(int target) {
    if (decision_level() <= target) return;
    for (std::size_t i = trail.size(); i > trail_lim[static_cast<std::size_t>(target)]; --i) {
      int v = lit_var(trail[i - 1]);
      if (cfg.phase_saving) saved_phase[v] = lit_sign(trail[i - 1]) ? 0 : 1;
      assigns[v] = kUndef;
      reason[v] = kNoClause;
      if (heap_index[v] < 0) heap_insert(v);
    }
    trail.resize(trail_lim[static_cast<std::size_t>(target)]);
    trail_lim.resize(static_cast<std::size_t>(target));
    qhead = trail.size();
  }

  // ---- VSIDS heap (max activity, ties on lower index) --------------------
  bool heap_less(int a, int b) const {
    if (activity[a] != activity[b]) return activity[a] > activity[b];
    return a < b;
  }
  void heap_up(std::size_t i) {
    int v = heap[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!heap_less(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_index[heap[i]] = static_cast<int>(i);
      i = parent;
    }
    heap[i] = v;
    heap_index[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    int v = heap[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap.size()) break;
      if (child + 1 < heap.size() && heap_less(heap[child + 1], heap[child])) child++;
      if (!heap_less(heap[child], v)) break;
      heap[i] = heap[child];
      heap_index[heap[i]] = static_cast<int>(i);
      i = child;
    }
    heap[i] = v;
    heap_index[v] = static_cast<int>(i);
  }
  void heap_insert(int v) {
    heap.push_back(v);
    heap_index[v] = static_cast<int>(heap.size() - 1);
    heap_up(heap.size() - 1);
  }
  int heap_pop() {
    int top = heap[0];
    heap_index[top] = -1;
    int last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_index[last] = 0;
      heap_down(0);
    }
    return top;
  }

  void bump_var(int v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (double& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_index[v] >= 0) heap_up(static_cast<std::size_t>(heap_index[v]));
  }
  void bump_clause(std::uint32_t cref) {
    float& a = act(cref);
    a += static_cast<float>(cla_inc);
    if (a > 1e20f) {
      for (std::uint32_t c : learnt_clauses) act(c) *= 1e-20f;
      cla_inc *= 1e-20;
    }
  }

  // ---- clauses ---------------------------------------------------------
  bool add_clause(std::span<const Lit> input) {
    if (!ok) return false;
    cancel_until(0);
    std::vector<ILit> ls;
    ls.reserve(input.size());
    for (Lit l : input) {
      if (l == 0) throw Error(ErrorKind::InvalidArgument, "literal 0 is not a valid literal");
      while (var_of(l) > num_vars()) new_var();
      ls.push_back(from_dimacs(l));
    }
    std::sort(ls.begin(), ls.end());
    std::vector<ILit> kept;
    ILit prev = kNoLit;
    for (ILit l : ls) {
      if (value(l) == kTrue || (prev != kNoLit && l == neg(prev))) return true;
      if (l != prev && value(l) != kFalse) kept.push_back(l);
      prev = l;
    }
    if (kept.empty()) return ok = false;
    if (kept.size() == 1) {
      enqueue(kept[0], kNoClause);
      if (propagate() != kNoClause) ok = false;
      return ok;
    }
    std::uint32_t cref = alloc(kept, false);
    problem_clauses.push_back(cref);
    attach(cref);
    return true;
  }

  std::uint32_t propagate() {
    std::uint32_t conflict = kNoClause;
    while (qhead < trail.size()) {
      ILit p = trail[qhead++];
      stats.propagations++;
      std::vector<Watcher>& ws = watches[p];
      ILit false_lit = neg(p);
      std::size_t i = 0;
      std::size_t j = 0;
      const std::size_t n = ws.size();
      while (i < n) {
        Watcher w = ws[i++];
        if (value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        if (deleted(w.cref)) continue;
        ILit* c = lits(w.cref);
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        ILit first = c[0];
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        std::uint32_t size = size_of(w.cref);
        bool moved = false;
        for (std::uint32_t k = 2; k < size; ++k) {
          if (value(c[k]) != kFalse) {
            c[1] = c[k];
            c[k] = false_lit;
            watches[neg(c[1])].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < n) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoClause) break;
    }
    return conflict;
  }

  void analyze(std::uint32_t conflict, std::vector<ILit>& out, int& backtrack_level) {
    out.clear();
    out.push_back(kNoLit);
    int path = 0;
    ILit p = kNoLit;
    std::size_t index = trail.size();
    std::vector<int> touched;
    do {
      if (learnt(conflict)) bump_clause(conflict);
      const ILit* c = lits(conflict);
      std::uint32_t size = size_of(conflict);
      for (std::uint32_t k = (p == kNoLit ? 0 : 1); k < size; ++k) {
        ILit q = c[k];
        int v = lit_var(q);
        if (!seen[v] && level[v] > 0) {
          seen[v] = 1;
          touched.push_back(v);
          bump_var(v);
          if (level[v] >= decision_level()) {
            path++;
          } else {
            out.push_back(q);
          }
        }
      }
      while (!seen[lit_var(trail[--index])]) {
      }
      p = trail[index];
      conflict = reason[lit_var(p)];
      seen[lit_var(p)] = 0;
      path--;
    } while (path > 0);
    out[0] = neg(p);

    // Drop literals implied by the rest of the clause through their reasons.
    std::size_t keep = 1;
    for (std::size_t k = 1; k < out.size(); ++k) {
      int v = lit_var(out[k]);
      std::uint32_t r = reason[v];
      bool redundant = r != kNoClause;
      if (redundant) {
        const ILit* rc = lits(r);
        for (std::uint32_t m = 0; m < size_of(r); ++m) {
          int u = lit_var(rc[m]);
          if (u == v) continue;
          if (!seen[u] && level[u] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) out[keep++] = out[k];
    }
    out.resize(keep);

    if (out.size() == 1) {
      backtrack_level = 0;
    } else {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < out.size(); ++k) {
        if (level[lit_var(out[k])] > level[lit_var(out[max_i])]) max_i = k;
      }
      std::swap(out[1], out[max_i]);
      backtrack_level = level[lit_var(out[1])];
    }
    for (int v : touched) seen[v] = 0;
  }

  // Assumptions responsible for `p` being false.
  void analyze_final(ILit p) {
    conflict_core.clear();
    conflict_core.push_back(p);
    if (decision_level() == 0) return;
    seen[lit_var(p)] = 1;
    for (std::size_t i = trail.size(); i > trail_lim[0]; --i) {
      int v = lit_var(trail[i - 1]);
      if (!seen[v]) continue;
      if (reason[v] == kNoClause) {
        conflict_core.push_back(neg(trail[i - 1]));
      } else {
        const ILit* c = lits(reason[v]);
        for (std::uint32_t k = 0; k < size_of(reason[v]); ++k) {
          int u = lit_var(c[k]);
          if (u != v && level[u] > 0) seen[u] = 1;
        }
      }
      seen[v] = 0;
    }
    seen[lit_var(p)] = 0;
  }

  bool locked(std::uint32_t cref) const {
    ILit first = lits(cref)[0];
    int v = lit_var(first);
    return value(first) == kTrue && reason[v] == cref;
  }

  void reduce_db() {
    std::vector<std::uint32_t> sorted = learnt_clauses;
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
      return act(a) < act(b);
    });
    std::size_t half = sorted.size() / 2;
    std::vector<std::uint32_t> survivors;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      std::uint32_t cref = sorted[k];
      if (k < half && size_of(cref) > 2 && !locked(cref)) {
        arena[cref] |= kDeletedBit;
        wasted += size_of(cref) + 2;
      } else {
        survivors.push_back(cref);
      }
    }
    std::sort(survivors.begin(), survivors.end());
    learnt_clauses = std::move(survivors);
    if (wasted * 2 > arena.size()) collect_garbage();
  }

  void collect_garbage() {
    std::vector<std::uint32_t> fresh;
    fresh.reserve(arena.size() - wasted);
    auto move_clause = [&](std::uint32_t cref) {
      auto target = static_cast<std::uint32_t>(fresh.size());
      std::uint32_t words = size_of(cref) + 2;
      fresh.insert(fresh.end(), arena.begin() + cref, arena.begin() + cref + words);
      return target;
    };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> relocation;
    for (auto& c : problem_clauses) {
      std::uint32_t moved = move_clause(c);
      relocation.emplace_back(c, moved);
      c = moved;
    }
    for (auto& c : learnt_clauses) {
      std::uint32_t moved = move_clause(c);
      relocation.emplace_back(c, moved);
      c = moved;
    }
    std::sort(relocation.begin(), relocation.end());
    auto relocate = [&](std::uint32_t old) {
      auto it = std::lower_bound(relocation.begin(), relocation.end(),
                                 std::make_pair(old, std::uint32_t{0}));
      return (it != relocation.end() && it->first == old) ? it->second : kNoClause;
    };
    for (int v = 0; v < num_vars(); ++v) {
      if (reason[v] != kNoClause) reason[v] = relocate(reason[v]);
    }
    arena = std::move(fresh);
    wasted = 0;
    for (auto& ws : watches) ws.clear();
    for (std::uint32_t c : problem_clauses) attach(c);
    for (std::uint32_t c : learnt_clauses) attach(c);
  }

  ILit pick_branch() {
    while (!heap.empty()) {
      int v = heap_pop();
      if (assigns[v] == kUndef) {
        bool positive = cfg.phase_saving ? saved_phase[v] != 0 : cfg.default_polarity;
        return make_lit(v, !positive);
      }
    }
    return kNoLit;
  }

  void check_budget() {
    std::uint64_t used = stats.conflicts - conflicts_at_start;
    if (cfg.conflict_limit != 0 && used >= cfg.conflict_limit) {
      cancel_until(0);
      throw Error(ErrorKind::ResourceLimit,
                  "conflict limit of " + std::to_string(cfg.conflict_limit) + " reached");
    }
    if (cfg.time_limit_ms != 0 && (used & 255u) == 0) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      if (static_cast<std::uint64_t>(elapsed.count()) >= cfg.time_limit_ms) {
        cancel_until(0);
        throw Error(ErrorKind::ResourceLimit,
                    "time limit of " + std::to_string(cfg.time_limit_ms) + " ms reached");
      }
    }
  }

  // 1 = sat, -1 = unsat, 0 = restart
  int search(double budget) {
    std::uint64_t local_conflicts = 0;
    std::vector<ILit> learnt;
    for (;;) {
      std::uint32_t conflict = propagate();
      if (conflict != kNoClause) {
        stats.conflicts++;
        local_conflicts++;
        if (decision_level() == 0) {
          ok = false;
          return -1;
        }
        int backtrack_level = 0;
        analyze(conflict, learnt, backtrack_level);
        cancel_until(backtrack_level);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoClause);
        } else {
          std::uint32_t cref = alloc(learnt, true);
          learnt_clauses.push_back(cref);
          stats.learnt_clauses++;
          attach(cref);
          bump_clause(cref);
          enqueue(learnt[0], cref);
        }
        var_inc /= cfg.var_decay;
        cla_inc /= cfg.clause_decay;
        check_budget();
        continue;
      }
      if (budget >= 0 && static_cast<double>(local_conflicts) >= budget) {
        cancel_until(0);
        return 0;
      }
      if (static_cast<double>(learnt_clauses.size()) >= max_learnts + static_cast<double>(trail.size())) {
        reduce_db();
      }
      ILit next = kNoLit;
      while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
        ILit a = assumptions[static_cast<std::size_t>(decision_level())];
        if (value(a) == kTrue) {
          trail_lim.push_back(trail.size());
        } else if (value(a) == kFalse) {
          analyze_final(neg(a));
          return -2;
        } else {
          next = a;
          break;
        }
      }
      if (next == kNoLit) {
        stats.decisions++;
        next = pick_branch();
        if (next == kNoLit) return 1;
      }
      trail_lim.push_back(trail.size());
      enqueue(next, kNoClause);
    }
  }

  SolveResult solve(std::span<const Lit> assumption_lits) {
    SolveResult result;
    conflict_core.clear();
    assumptions.clear();
    for (Lit l : assumption_lits) {
      while (var_of(l) > num_vars()) new_var();
      assumptions.push_back(from_dimacs(l));
    }
    if (!ok) return result;
    cancel_until(0);
    if (propagate() != kNoClause) {
      ok = false;
      return result;
    }
    started = std::chrono::steady_clock::now();
    conflicts_at_start = stats.conflicts;
    max_learnts = std::max(5000.0, static_cast<double>(problem_clauses.size()) * cfg.learnt_fraction);

    int status = 0;
    for (int round = 0; status == 0; ++round) {
      double budget = luby(2.0, round) * cfg.restart_base;
      status = search(budget);
      if (status == 0) {
        stats.restarts++;
        max_learnts *= 1.1;
      }
    }

    if (status == 1) {
      result.status = Status::Sat;
      result.assignment.assign(static_cast<std::size_t>(num_vars()) + 1, false);
      for (int v = 0; v < num_vars(); ++v) result.assignment[static_cast<std::size_t>(v) + 1] = assigns[v] == kTrue;
      if (cfg.check_models) verify(result);
    } else if (status == -2) {
      for (ILit l : conflict_core) {
        ILit assumed = neg(l);
        for (std::size_t k = 0; k < assumptions.size(); ++k) {
          if (assumptions[k] == assumed) {
            result.core.push_back(k);
            break;
          }
        }
      }
      std::sort(result.core.begin(), result.core.end());
      result.core.erase(std::unique(result.core.begin(), result.core.end()), result.core.end());
    }
    cancel_until(0);
    return result;
  }

  void verify(const SolveResult& r) const {
    for (std::uint32_t cref : problem_clauses) {
      const ILit* c = lits(cref);
      bool satisfied = false;
      for (std::uint32_t k = 0; k < size_of(cref) && !satisfied; ++k) {
        Lit l = to_dimacs(c[k]);
        satisfied = r.value_of_lit(l);
      }
      if (!satisfied) throw Error(ErrorKind::Internal, "solver model violates a problem clause");
    }
    for (ILit l : trail) {
      if (!r.value_of_lit(to_dimacs(l))) throw Error(ErrorKind::Internal, "solver model violates a unit");
    }
  }
};

Solver::Solver(SolverConfig config) : impl_(std::make_unique<Impl>(config)) {}
Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

Var Solver::new_var() {
  impl_->new_var();
  return impl_->num_vars();
}

void Solver::ensure_vars(int n) {
  while (impl_->num_vars() < n) impl_->new_var();
}

int Solver::num_vars() const { return impl_->num_vars(); }

bool Solver::add_clause(std::span<const Lit> lits) { return impl_->add_clause(lits); }

void Solver::add_cnf(const CnfFormula& cnf) {
  ensure_vars(cnf.num_vars());
  for (std::size_t i = 0; i < cnf.num_clauses(); ++i) {
    if (!impl_->add_clause(cnf.clause(i))) return;
  }
}

SolveResult Solver::solve(std::span<const Lit> assumptions) { return impl_->solve(assumptions); }

const SolverStats& Solver::stats() const { return impl_->stats; }

SolveResult solve(const CnfFormula& cnf, std::span<const Lit> assumptions, SolverConfig config) {
  Solver solver(config);
  solver.add_cnf(cnf);
  return solver.solve(assumptions);
}

ModelEnumerator::ModelEnumerator(const CnfFormula& cnf, std::vector<Var> projection,
                                 std::size_t limit, SolverConfig config)
    : solver_(config), projection_(std::move(projection)), limit_(limit) {
  solver_.add_cnf(cnf);
  for (Var v : projection_) solver_.ensure_vars(v);
}

std::optional<std::vector<bool>> ModelEnumerator::next() {
  if (exhausted_ || produced_ >= limit_) return std::nullopt;
  SolveResult r = solver_.solve();
  if (!r.sat()) {
    exhausted_ = true;
    return std::nullopt;
  }
  std::vector<bool> projected;
  std::vector<Lit> blocking;
  projected.reserve(projection_.size());
  for (Var v : projection_) {
    bool value = r.value(v);
    projected.push_back(value);
    blocking.push_back(value ? -v : v);
  }
  produced_++;
  if (!solver_.add_clause(blocking)) exhausted_ = true;
  return projected;
}

std::vector<std::vector<bool>> enumerate(const CnfFormula& cnf, const std::vector<Var>& projection,
                                         std::size_t limit, SolverConfig config) {
  ModelEnumerator it(cnf, projection, limit, config);
  std::vector<std::vector<bool>> models;
  while (auto m = it.next()) models.push_back(std::move(*m));
  return models;
}

}  // namespace tracer::sat
