#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tracer::sat {

// Variables are 1-based and literals are signed integers, as in DIMACS.
using Var = int;
using Lit = int;

inline Var var_of(Lit lit) { return lit < 0 ? -lit : lit; }

// Flat clause storage; large grounded problems produce millions of short
// clauses, so clauses share a single literal buffer.
class CnfFormula {
 public:
  int num_vars() const noexcept { return num_vars_; }
  void set_num_vars(int n) { num_vars_ = n; }
  Var new_var() { return ++num_vars_; }

  void add_clause(std::span<const Lit> lits);
  void add_clause(std::initializer_list<Lit> lits) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  std::size_t num_clauses() const noexcept { return starts_.size(); }
  std::span<const Lit> clause(std::size_t i) const;
  std::size_t num_literals() const noexcept { return literals_.size(); }

  void reserve(std::size_t clauses, std::size_t literals) {
    starts_.reserve(clauses);
    literals_.reserve(literals);
  }

  // Tseitin auxiliary variable -> originating circuit node (debugging aid).
  std::map<Var, std::uint32_t> aux_nodes;

  friend bool operator==(const CnfFormula& a, const CnfFormula& b) {
    return a.num_vars_ == b.num_vars_ && a.starts_ == b.starts_ && a.literals_ == b.literals_;
  }

 private:
  int num_vars_ = 0;
  std::vector<std::size_t> starts_;
  std::vector<Lit> literals_;
};

struct SolverConfig {
  double var_decay = 0.95;
  double clause_decay = 0.999;
  int restart_base = 100;         // conflicts per Luby unit
  double learnt_fraction = 0.33;  // initial learnt budget relative to problem clauses
  std::uint64_t conflict_limit = 0;  // 0 = unlimited, per solve() call
  std::uint64_t time_limit_ms = 0;   // 0 = unlimited
  bool phase_saving = false;
  bool default_polarity = false;  // FALSE first: Horn inputs yield their least model
  bool check_models = true;

  // Defaults with TRACER_SAT_CONFLICT_LIMIT applied when set.
  static SolverConfig from_environment();
  static SolverConfig from_environment(SolverConfig base);
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt_clauses = 0;
};

enum class Status { Sat, Unsat };

struct SolveResult {
  Status status = Status::Unsat;
  std::vector<bool> assignment;    // indexed by variable, slot 0 unused
  std::vector<std::size_t> core;   // positions into the assumption list

  bool sat() const noexcept { return status == Status::Sat; }
  bool value(Var v) const { return assignment.at(static_cast<std::size_t>(v)); }
  bool value_of_lit(Lit l) const { return l > 0 ? value(l) : !value(-l); }
};

// CDCL solver: two watched literals, first-UIP learning, VSIDS, Luby restarts.
// Incremental: clauses may be added between solve() calls.
class Solver {
 public:
  explicit Solver(SolverConfig config = SolverConfig::from_environment());
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  Var new_var();
  void ensure_vars(int n);
  int num_vars() const;

  // Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }
  void add_cnf(const CnfFormula& cnf);

  // Throws Error{ResourceLimit} when a configured budget is exhausted.
  SolveResult solve(std::span<const Lit> assumptions = {});

  const SolverStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveResult solve(const CnfFormula& cnf, std::span<const Lit> assumptions = {},
                  SolverConfig config = SolverConfig::from_environment());

// Distinct models projected onto `projection`; a blocking clause is added
// after each model so that the next one differs on at least one projected var.
class ModelEnumerator {
 public:
  ModelEnumerator(const CnfFormula& cnf, std::vector<Var> projection, std::size_t limit,
                  SolverConfig config = SolverConfig::from_environment());

  // Values aligned with the projection, or nullopt once exhausted.
  std::optional<std::vector<bool>> next();
  std::size_t produced() const noexcept { return produced_; }

 private:
  Solver solver_;
  std::vector<Var> projection_;
  std::size_t limit_;
  std::size_t produced_ = 0;
  bool exhausted_ = false;
};

std::vector<std::vector<bool>> enumerate(const CnfFormula& cnf, const std::vector<Var>& projection,
                                         std::size_t limit,
                                         SolverConfig config = SolverConfig::from_environment());

std::string export_dimacs(const CnfFormula& cnf);
// Throws Error{MalformedDocument} on malformed input.
CnfFormula parse_dimacs(std::string_view text);

}  // namespace tracer::sat
