#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "tracer/error.hpp"
#include "tracer/sat.hpp"

namespace tracer::sat {
namespace {

using testing::dpll;
using testing::pigeonhole;
using testing::random_clauses;
using testing::satisfies;
using testing::to_formula;

TEST(SatSolver, AgreesWithDpllOnRandomFormulas) {
  std::mt19937 rng(20240611);
  int sat_count = 0;
  for (int round = 0; round < 1000; ++round) {
    auto [clauses, vars] = testing::random_cnf(rng);
    bool expected = dpll(clauses, std::vector<int>(vars + 1, 0));
    SolveResult r = solve(to_formula(clauses, vars));
    ASSERT_EQ(r.sat(), expected) << "round " << round;
    if (r.sat()) {
      ++sat_count;
      ASSERT_TRUE(satisfies(clauses, r)) << "round " << round;
    }
  }
  // The generator must exercise both verdicts.
  EXPECT_GT(sat_count, 100);
  EXPECT_LT(sat_count, 900);
}

TEST(SatSolver, PigeonholeFourIntoThreeIsUnsat) {
  EXPECT_FALSE(solve(pigeonhole(4, 3)).sat());
  EXPECT_TRUE(solve(pigeonhole(3, 3)).sat());
}

TEST(SatSolver, EmptyClauseIsUnsat) {
  CnfFormula f;
  f.set_num_vars(2);
  f.add_clause(std::span<const Lit>{});
  EXPECT_FALSE(solve(f).sat());
}

TEST(SatSolver, NoClausesIsSat) {
  CnfFormula f;
  f.set_num_vars(3);
  SolveResult r = solve(f);
  ASSERT_TRUE(r.sat());
  EXPECT_EQ(r.assignment.size(), 4u);
}

TEST(SatSolver, DefaultPolarityYieldsLeastModelOfHornClauses) {
  // 1, 1 -> 2, 2 -> 3; 4 is unconstrained.
  CnfFormula f;
  f.set_num_vars(4);
  f.add_clause({1});
  f.add_clause({-1, 2});
  f.add_clause({-2, 3});
  SolveResult r = solve(f);
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.value(3));
  EXPECT_FALSE(r.value(4));
}

TEST(SatSolver, AssumptionCoreNamesConflictingAssumptions) {
  Solver s;
  s.ensure_vars(3);
  s.add_clause({1, 2});
  std::vector<Lit> assumptions = {3, -1, -2};
  SolveResult r = s.solve(assumptions);
  ASSERT_FALSE(r.sat());
  std::vector<std::size_t> core = r.core;
  std::sort(core.begin(), core.end());
  EXPECT_EQ(core, (std::vector<std::size_t>{1, 2}));
  std::vector<Lit> weaker = {3, -1};
  SolveResult ok = s.solve(weaker);
  ASSERT_TRUE(ok.sat());
  EXPECT_TRUE(ok.value(2));
}

TEST(SatSolver, IncrementalClausesNarrowModels) {
  Solver s;
  s.ensure_vars(2);
  s.add_clause({1, 2});
  ASSERT_TRUE(s.solve().sat());
  s.add_clause({-1});
  SolveResult r = s.solve();
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.value(2));
  EXPECT_FALSE(s.add_clause({-2}));
  EXPECT_FALSE(s.solve().sat());
}

TEST(SatSolver, ConflictLimitRaisesResourceLimit) {
  SolverConfig config;
  config.conflict_limit = 5;
  try {
    solve(pigeonhole(9, 8), {}, config);
    FAIL() << "expected ResourceLimit";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
}

TEST(SatSolver, ConflictLimitIsReadFromEnvironment) {
  ::setenv("TRACER_SAT_CONFLICT_LIMIT", "42", 1);
  EXPECT_EQ(SolverConfig::from_environment().conflict_limit, 42u);
  ::unsetenv("TRACER_SAT_CONFLICT_LIMIT");
  EXPECT_EQ(SolverConfig::from_environment().conflict_limit, 0u);
}

TEST(ModelEnumeration, CountsAllProjectedModels) {
  CnfFormula free;
  free.set_num_vars(4);
  EXPECT_EQ(enumerate(free, {1, 2, 3, 4}, 100).size(), 16u);
  EXPECT_EQ(enumerate(free, {1, 2}, 100).size(), 4u);
  EXPECT_EQ(enumerate(free, {1, 2, 3, 4}, 5).size(), 5u);

  CnfFormula xor2;  // exactly one of 1, 2
  xor2.set_num_vars(2);
  xor2.add_clause({1, 2});
  xor2.add_clause({-1, -2});
  auto models = enumerate(xor2, {1, 2}, 10);
  ASSERT_EQ(models.size(), 2u);
  EXPECT_NE(models[0], models[1]);
  EXPECT_TRUE(enumerate(pigeonhole(3, 2), {1}, 10).empty());
}

TEST(ModelEnumeration, PigeonholePermutations) {
  // 3 pigeons into 3 holes with at most one pigeon per hole, every pigeon
  // somewhere and at most one hole per pigeon: 3! assignments.
  CnfFormula f = pigeonhole(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) f.add_clause({-(i * 3 + a + 1), -(i * 3 + b + 1)});
    }
  }
  std::vector<Var> all(9);
  std::iota(all.begin(), all.end(), 1);
  EXPECT_EQ(enumerate(f, all, 100).size(), 6u);
}

TEST(Dimacs, ExportIsDeterministicAndRoundTrips) {
  std::mt19937 rng(7);
  CnfFormula f = to_formula(random_clauses(rng, 12, 40), 12);
  std::string a = export_dimacs(f);
  std::string b = export_dimacs(f);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("p cnf 12 40\n", 0), 0u);
  CnfFormula back = parse_dimacs(a);
  EXPECT_EQ(back, f);
  EXPECT_EQ(export_dimacs(back), a);
}

TEST(Dimacs, ParsesCommentsAndMultiLineClauses) {
  CnfFormula f = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 0 3 0\n");
  EXPECT_EQ(f.num_vars(), 3);
  ASSERT_EQ(f.num_clauses(), 2u);
  EXPECT_EQ(std::vector<Lit>(f.clause(0).begin(), f.clause(0).end()), (std::vector<Lit>{1, -2}));
}

TEST(Dimacs, RejectsMalformedInput) {
  for (const char* bad : {"p cnf x 1\n1 0\n", "p cnf 2 1\n1 5 0\n", "1 2 0\n", "p cnf 2 1\n1 2\n", "p cnf 2 1\n1 a 0\n"}) {
    try {
      parse_dimacs(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::MalformedDocument) << bad;
    }
  }
}

}  // namespace
}  // namespace tracer::sat
