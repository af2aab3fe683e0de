#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "tracer/error.hpp"
#include "tracer/nl.hpp"

namespace tracer::nl {
namespace {

const Lexicon& lexicon() {
  static const Lexicon lex = parse_lexicon(testing::data("sidp.lexicon.json"));
  return lex;
}

std::string labels(std::string_view sentence) {
  std::string out;
  for (const Chunk& c : chunk_and_lex(sentence, lexicon())) out += c.label();
  return out;
}

FlatSemantics full_flat(std::string_view sentence) {
  ParseOutcome o = parse_sentence(sentence, lexicon());
  const Full* full = std::get_if<Full>(&o);
  EXPECT_NE(full, nullptr) << sentence;
  return full ? full->flat : FlatSemantics{};
}

ErrorKind flat_error(std::string_view text) {
  try {
    flat_to_dl(parse_flat(text));
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorKind::Internal;
}

TEST(NlChunker, LongestNominalMatchAndVerbals) {
  EXPECT_EQ(labels("Bracket shall be used in hydraulic area Alpha"),
            "[NP:Bracket][V:use][P:in][NP:HydraulicAreaAlpha]");
  EXPECT_EQ(labels("Adhesive bonded brackets shall be installed in fuel tank."),
            "[NP:AdhesiveBondedBracket][V:install][P:in][NP:FuelTank]");
  EXPECT_EQ(labels("Pipes shall not be used"), "[NP:Pipe][NEG][V:use]");
  EXPECT_EQ(labels("the bracket is green"), "[?:the][NP:Bracket][?:is][?:green]");
  EXPECT_EQ(labels(""), "");
}

TEST(NlChunker, WordsAndOffsets) {
  EXPECT_EQ(words_of("  Bracket, shall (be) used!  "), (std::vector<std::string>{"Bracket", "shall", "be", "used"}));
  auto chunks = chunk_and_lex("Bracket shall be used in hydraulic area", lexicon());
  ASSERT_EQ(chunks.size(), 4u);
  EXPECT_EQ(chunks[1].first_word, 1u);
  EXPECT_EQ(chunks[1].word_count, 3u);
  EXPECT_EQ(chunks[3].first_word, 5u);
  EXPECT_EQ(chunks[3].word_count, 2u);
  EXPECT_EQ(chunks[3].text, "hydraulic area");
  ASSERT_NE(chunks[1].verbal, nullptr);
  EXPECT_TRUE(chunks[1].verbal->inverse);
}

TEST(NlParser, TableSentencesParseFully) {
  EXPECT_EQ(to_string(full_flat("Bracket shall be used in hydraulic area")),
            "l0:subset(l1,l2) l1:Bracket l2:exists(l3,l4) l3:rinv(use) l4:HydraulicArea");
  dl::SidpAxiom ax = flat_to_dl(full_flat("Adhesive bonded bracket shall be used in hydraulic area Alpha"), "r3");
  EXPECT_EQ(ax.source, "r3");
  EXPECT_EQ(dl::to_string(ax.sub), "AdhesiveBondedBracket");
  EXPECT_EQ(dl::to_string(ax.sup), "some(inv(use) HydraulicAreaAlpha)");
}

// Golden output reviewed by hand: the negated passive without a location
// says that no pipe is the object of any use.
TEST(NlParser, NegatedPassiveGolden) {
  FlatSemantics flat = full_flat("Pipes shall not be used.");
  EXPECT_EQ(to_string(flat), "l0:subset(l1,l2) l1:Pipe l2:not(l3) l3:exists(l4,l5) l4:rinv(use) l5:top");
  dl::SidpAxiom ax = flat_to_dl(flat);
  EXPECT_EQ(dl::to_string(ax.sub), "Pipe");
  EXPECT_EQ(dl::to_string(ax.sup), "not(some(inv(use) top))");
}

TEST(NlParser, FailureOutcomes) {
  auto reason = [](std::string_view s) {
    ParseOutcome o = parse_sentence(s, lexicon());
    const Failure* f = std::get_if<Failure>(&o);
    return f ? f->reason : std::string("<parsed>");
  };
  EXPECT_EQ(reason("in hydraulic area"), "no subject");
  EXPECT_EQ(reason(""), "no subject");
  EXPECT_EQ(reason("Bracket in hydraulic area"), "no verbal anchor");
  EXPECT_EQ(reason("Bracket"), "no verbal anchor");
}

TEST(NlParser, PartialOutcomeRecordsSkippedSpans) {
  ParseOutcome o = parse_sentence("Brackets shall be used in hydraulic area immediately", lexicon());
  const Partial* p = std::get_if<Partial>(&o);
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->skipped, (std::vector<Span>{{7, 1}}));
  EXPECT_EQ(dl::to_string(flat_to_dl(p->flat).sup), "some(inv(use) HydraulicArea)");
}

TEST(NlFlat, PrintParseRoundTrip) {
  for (const char* s : {"Bracket shall be used in hydraulic area", "Pipes shall not be used",
                        "Adhesive bonded bracket shall be installed in fuel tank"}) {
    FlatSemantics flat = full_flat(s);
    EXPECT_EQ(parse_flat(to_string(flat)), flat) << s;
  }
  EXPECT_EQ(to_string(parse_flat("l0:subset(l1,l2) l1:A l2:and(l3,l4) l3:B l4:or(l5,l6) l5:C l6:rel(r)")),
            "l0:subset(l1,l2) l1:A l2:and(l3,l4) l3:B l4:or(l5,l6) l5:C l6:rel(r)");
}

TEST(NlFlat, TranslationErrors) {
  EXPECT_EQ(flat_error("l0:subset(l1,l2) l1:A l2:frobnicate(l3)"), ErrorKind::UnknownLiteral);
  EXPECT_EQ(flat_error("l0:subset(l1,l2) l1:A"), ErrorKind::UnknownLiteral);                      // dangling
  EXPECT_EQ(flat_error("l0:subset(l1,l2) l1:A l2:not(l2)"), ErrorKind::UnknownLiteral);           // cyclic
  EXPECT_EQ(flat_error("l0:subset(l1,l2) l1:A l2:B l2:C"), ErrorKind::UnknownLiteral);            // duplicate
  EXPECT_EQ(flat_error("l0:subset(l1,l2) l1:A l2:exists(l1,l1)"), ErrorKind::UnknownLiteral);     // role misuse
  EXPECT_EQ(flat_error("l0:subset(l1,l2) l1:A l2:rel(r)"), ErrorKind::UnknownLiteral);            // role as concept
  EXPECT_EQ(flat_error("l0:subset(l1) l1:A"), ErrorKind::UnknownLiteral);                         // arity
  EXPECT_EQ(flat_error("l1:A"), ErrorKind::UnknownLiteral);                                       // no subset
  EXPECT_EQ(flat_error("l0:subset(l1,l2) l9:subset(l1,l2) l1:A l2:B"), ErrorKind::UnknownLiteral);
}

TEST(NlLexicon, Validation) {
  EXPECT_THROW(Lexicon({{"", "A"}}, {}), Error);
  EXPECT_THROW(Lexicon({}, {{"used", {"shall"}, "use", true, "unknown_schema"}}), Error);
  EXPECT_THROW(Lexicon({}, {{"used", {}, "", true, std::string(kPassiveLocation)}}), Error);
  try {
    parse_lexicon("{\"nominals\": 3}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedDocument);
  }
  Lexicon lex({{"Big  Pipe", "Pipe"}}, {});
  EXPECT_EQ(lex.nominals()[0].surface, "big pipe");
  EXPECT_EQ(lex.longest_nominal(), 2u);
}

TEST(NlParser, WordSaladNeverCrashes) {
  const std::vector<std::string> words = {"bracket", "brackets", "shall", "be", "not", "used", "installed", "in",
                                          "on",      "hydraulic", "area", "alpha", "fuel", "tank", "the", "pipes",
                                          "adhesive", "bonded", ",", "."};
  const std::vector<std::string> templates = {"brackets shall be used", "pipes shall not be used",
                                              "brackets shall be installed in fuel tank",
                                              "adhesive bonded brackets shall be used in hydraulic area alpha"};
  std::mt19937 rng(3);
  int full = 0;
  for (int i = 0; i < 5000; ++i) {
    std::vector<std::string> picked;
    if (i % 2 == 0) {
      int n = static_cast<int>(rng() % 12);
      for (int k = 0; k < n; ++k) picked.push_back(words[rng() % words.size()]);
    } else {
      // Grammatical sentences with at most one word replaced.
      std::istringstream in(templates[rng() % templates.size()]);
      for (std::string w; in >> w;) picked.push_back(w);
      if (rng() % 2 == 0) picked[rng() % picked.size()] = words[rng() % words.size()];
    }
    std::string s;
    for (const auto& w : picked) s += w + " ";
    ParseOutcome o = parse_sentence(s, lexicon());
    if (const Full* f = std::get_if<Full>(&o)) {
      ++full;
      EXPECT_NO_THROW(flat_to_dl(f->flat)) << s;
      EXPECT_EQ(parse_flat(to_string(f->flat)), f->flat);
    } else if (const Partial* p = std::get_if<Partial>(&o)) {
      EXPECT_FALSE(p->skipped.empty());
      EXPECT_NO_THROW(flat_to_dl(p->flat)) << s;
    }
  }
  EXPECT_GT(full, 0);
}

}  // namespace
}  // namespace tracer::nl
