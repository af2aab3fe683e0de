#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tracer/dl.hpp"
#include "tracer/error.hpp"

namespace tracer::dl {
namespace {

TEST(DlReasoner, HandCheckedSubsumptions) {
  int errors = 0;
  for (const auto& c : testing::subsumption_cases()) {
    Ontology onto = parse_ontology(c.ontology);
    bool got = subsumes(parse_concept(c.sup), parse_concept(c.sub), onto);
    EXPECT_EQ(got, c.holds) << c.sub << " <= " << c.sup << " under {" << c.ontology << "}";
    errors += got != c.holds;
  }
  EXPECT_EQ(errors, 0);
  EXPECT_GE(testing::subsumption_cases().size(), 30u);
}

TEST(DlReasoner, FunctionalRoleMergeClashes) {
  Ontology onto = parse_ontology(testing::data("sidp.ontology"));
  ConceptPtr c = parse_concept("and(Bracket some(inv(install) HydraulicArea) some(inv(install) FuelTank))");
  EXPECT_FALSE(is_satisfiable(c, onto));
  // use is a sub-role of install, so the merge also fires across the two roles.
  EXPECT_FALSE(is_satisfiable(
      parse_concept("and(Bracket some(inv(use) HydraulicArea) some(inv(install) FuelTank))"), onto));
  // Without functionality the two areas stay apart.
  Ontology loose = onto;
  loose.functional.clear();
  EXPECT_TRUE(is_satisfiable(c, loose));
}

TEST(DlReasoner, ShippedOntologyEntailments) {
  Ontology onto = parse_ontology(testing::data("sidp.ontology"));
  EXPECT_TRUE(subsumes(parse_concept("Bracket"), parse_concept("AdhesiveBondedBracket"), onto));
  EXPECT_TRUE(subsumes(parse_concept("some(inv(install) HydraulicArea)"),
                       parse_concept("some(inv(use) HydraulicAreaAlpha)"), onto));
  EXPECT_FALSE(subsumes(parse_concept("some(inv(use) HydraulicArea)"),
                        parse_concept("some(inv(install) HydraulicArea)"), onto));
  EXPECT_FALSE(is_satisfiable(parse_concept("and(HydraulicAreaAlpha FuelTank)"), onto));
}

class ConceptGen {
 public:
  explicit ConceptGen(std::mt19937& rng) : rng_(rng) {}

  ConceptPtr make(int depth) {
    static const char* atoms[] = {"A", "B", "C"};
    if (depth <= 0 || rng_() % 4 == 0) {
      ConceptPtr a = atomic(atoms[rng_() % 3]);
      return rng_() % 3 == 0 ? negate(a) : a;
    }
    Role r{"r", rng_() % 3 == 0};
    switch (rng_() % 5) {
      case 0: return conj({make(depth - 1), make(depth - 1)});
      case 1: return disj({make(depth - 1), make(depth - 1)});
      case 2: return exists(r, make(depth - 1));
      case 3: return forall(r, make(depth - 1));
      default: return negate(make(depth - 1));
    }
  }

 private:
  std::mt19937& rng_;
};

TEST(DlReasoner, SubsumptionIsReflexiveAndTransitive) {
  Ontology onto = parse_ontology("SubObjectPropertyOf(r s)\nFunctionalObjectProperty(s)\nSubClassOf(A some(r B))");
  Reasoner reasoner(onto);
  std::mt19937 rng(31);
  ConceptGen gen(rng);
  std::vector<ConceptPtr> pool;
  for (int i = 0; i < 24; ++i) pool.push_back(gen.make(3));
  std::size_t n = pool.size();
  std::vector<std::vector<bool>> sub(n, std::vector<bool>(n));
  int positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sub[i][j] = reasoner.subsumes(pool[j], pool[i]);  // pool[i] ⊑ pool[j]
      positives += i != j && sub[i][j];
    }
    EXPECT_TRUE(sub[i][i]) << to_string(pool[i]);
    EXPECT_EQ(reasoner.is_satisfiable(pool[i]), !reasoner.subsumes(bottom(), pool[i]));
    EXPECT_TRUE(reasoner.subsumes(nnf(pool[i]), pool[i]) && reasoner.subsumes(pool[i], nnf(pool[i])));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (sub[i][j] && sub[j][k]) EXPECT_TRUE(sub[i][k]) << i << " " << j << " " << k;
  EXPECT_GT(positives, 0);
}

TEST(DlReasoner, NodeBudgetRaisesResourceLimit) {
  Ontology onto;
  ReasonerLimits limits;
  limits.max_nodes = 3;
  Reasoner reasoner(onto, limits);
  ConceptPtr wide = parse_concept("and(some(r A) some(r B) some(r C) some(r D))");
  try {
    reasoner.is_satisfiable(wide);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
  EXPECT_TRUE(is_satisfiable(wide, onto));
}

TEST(DlSyntax, PrintParseRoundTrip) {
  std::mt19937 rng(8);
  ConceptGen gen(rng);
  for (int i = 0; i < 200; ++i) {
    ConceptPtr c = gen.make(4);
    std::string text = to_string(c);
    ConceptPtr back = parse_concept(text);
    EXPECT_TRUE(equal(c, back)) << text;
    EXPECT_EQ(to_string(back), text);
  }
  EXPECT_EQ(to_string(parse_concept("and(B, A)")), "and(A B)");
  EXPECT_EQ(to_string(parse_concept("owl:Thing")), "top");
  EXPECT_EQ(to_string(nnf(parse_concept("not(and(A some(r B)))"))), "or(all(r not(B)) not(A))");
  EXPECT_EQ(to_string(parse_role("inv(r)")), "inv(r)");
}

TEST(DlSyntax, Errors) {
  for (const char* bad : {"", "and(A", "some(A)", "some(r)", "not()", "A B", "all(inv( B)"}) {
    try {
      parse_concept(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::MalformedDocument) << bad;
    }
  }
  try {
    parse_ontology("SubClassOf(A B)\nSubClassOf(A)\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedDocument);
    EXPECT_EQ(std::string(e.what()).rfind("line 2", 0), 0u) << e.what();
  }
  try {
    parse_ontology("SubObjectPropertyOf(r s)\nSubObjectPropertyOf(s r)\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(DlTraces, ConflictsAreSymmetric) {
  Ontology onto = parse_ontology(testing::data("sidp.ontology"));
  std::vector<SidpAxiom> axioms = {
      {"a", atomic("Bracket"), parse_concept("some(inv(install) HydraulicArea)")},
      {"b", atomic("Bracket"), parse_concept("some(inv(install) FuelTank)")},
      {"c", atomic("AdhesiveBondedBracket"), parse_concept("some(inv(use) HydraulicAreaAlpha)")},
      {"d", atomic("Pipe"), parse_concept("not(some(inv(use) top))")},
      {"e", atomic("Pipe"), parse_concept("some(inv(use) FuelTank)")},
  };
  Reasoner with(onto);
  Reasoner without(onto.without_role_inclusions());
  for (const auto& a : axioms) {
    for (const auto& b : axioms) {
      if (a.source == b.source) continue;
      auto ab = detect_trace(a, b, with, without);
      auto ba = detect_trace(b, a, with, without);
      bool c1 = std::any_of(ab.begin(), ab.end(), [](auto& t) { return t.kind == TraceKind::Conflicts; });
      bool c2 = std::any_of(ba.begin(), ba.end(), [](auto& t) { return t.kind == TraceKind::Conflicts; });
      EXPECT_EQ(c1, c2) << a.source << " " << b.source;
    }
  }
  auto ab = detect_trace(axioms[0], axioms[1], onto);
  ASSERT_EQ(ab.size(), 1u);
  EXPECT_EQ(ab[0], (DetectedTrace{TraceKind::Conflicts, "a", "b"}));
  auto de = detect_trace(axioms[3], axioms[4], onto);
  ASSERT_EQ(de.size(), 1u);
  EXPECT_EQ(de[0].kind, TraceKind::Conflicts);
}

TEST(DlTraces, RefinesVersusRequires) {
  Ontology onto = parse_ontology(testing::data("sidp.ontology"));
  SidpAxiom used{"u", atomic("Bracket"), parse_concept("some(inv(use) HydraulicArea)")};
  SidpAxiom used_alpha{"ua", atomic("Bracket"), parse_concept("some(inv(use) HydraulicAreaAlpha)")};
  SidpAxiom installed{"i", atomic("Bracket"), parse_concept("some(inv(install) HydraulicArea)")};
  EXPECT_EQ(detect_trace(used_alpha, used, onto), (std::vector<DetectedTrace>{{TraceKind::Refines, "ua", "u"}}));
  EXPECT_EQ(detect_trace(used, installed, onto), (std::vector<DetectedTrace>{{TraceKind::Requires, "u", "i"}}));
  SidpAxiom twin{"t", atomic("Bracket"), parse_concept("some(inv(use) HydraulicArea)")};
  EXPECT_EQ(detect_trace(used, twin, onto), (std::vector<DetectedTrace>{{TraceKind::Equals, "u", "t"}}));
}

}  // namespace
}  // namespace tracer::dl
