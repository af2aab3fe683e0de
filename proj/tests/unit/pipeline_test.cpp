#include <gtest/gtest.h>

#include "support.hpp"
#include "tracer/pipeline.hpp"

namespace tracer::pipeline {
namespace {

using dl::DetectedTrace;
using dl::TraceKind;

const nl::Lexicon& lexicon() {
  static const nl::Lexicon lex = nl::parse_lexicon(testing::data("sidp.lexicon.json"));
  return lex;
}

const dl::Ontology& ontology() {
  static const dl::Ontology onto = dl::parse_ontology(testing::data("sidp.ontology"));
  return onto;
}

TEST(Sentences, LabelsCommentsAndOffsets) {
  auto s = split_sentences("# heading\nr1: Bracket shall be used\n\n  Pipes shall not be used  \nx.2-b:  text\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].id, "r1");
  EXPECT_EQ(s[0].text, "Bracket shall be used");
  EXPECT_EQ(s[0].line, 2u);
  EXPECT_EQ(s[0].offset, 14);
  EXPECT_EQ(s[1].id, "s4");
  EXPECT_EQ(s[1].text, "Pipes shall not be used");
  EXPECT_EQ(s[2].id, "x.2-b");
  EXPECT_EQ(s[2].text, "text");
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences("# only\n\n").empty());
}

TEST(Reduction, DropsTransitiveEntailments) {
  std::vector<DetectedTrace> detected = {
      {TraceKind::Refines, "a", "b"}, {TraceKind::Refines, "b", "c"}, {TraceKind::Refines, "a", "c"}};
  EXPECT_EQ(reduce(detected), (std::vector<DetectedTrace>{{TraceKind::Refines, "a", "b"}, {TraceKind::Refines, "b", "c"}}));
}

TEST(Reduction, DropsInheritedConflicts) {
  // a refines b, b conflicts c: a conflicts c follows.
  std::vector<DetectedTrace> detected = {{TraceKind::Refines, "a", "b"},
                                         {TraceKind::Conflicts, "b", "c"},
                                         {TraceKind::Conflicts, "c", "b"},
                                         {TraceKind::Conflicts, "a", "c"},
                                         {TraceKind::Conflicts, "c", "a"}};
  EXPECT_EQ(reduce(detected),
            (std::vector<DetectedTrace>{{TraceKind::Conflicts, "b", "c"}, {TraceKind::Refines, "a", "b"}}));
}

TEST(Reduction, KeepsEquivalentPairs) {
  std::vector<DetectedTrace> detected = {{TraceKind::Equals, "a", "b"}, {TraceKind::Refines, "a", "c"},
                                         {TraceKind::Refines, "b", "c"}};
  auto r = reduce(detected);
  EXPECT_NE(std::find(r.begin(), r.end(), DetectedTrace{TraceKind::Refines, "a", "c"}), r.end());
  EXPECT_NE(std::find(r.begin(), r.end(), DetectedTrace{TraceKind::Refines, "b", "c"}), r.end());
}

TEST(DlPipeline, TableOneSentences) {
  DlResult r = dl_pipeline(testing::data("table1.sentences.txt"), lexicon(), ontology());
  ASSERT_EQ(r.sentences.size(), 6u);
  for (const auto& s : r.sentences) EXPECT_EQ(s.status, "full") << s.sentence.id;
  std::vector<DetectedTrace> expected = {
      {TraceKind::Conflicts, "r5", "r6"}, {TraceKind::Refines, "r1", "r4"}, {TraceKind::Refines, "r2", "r4"},
      {TraceKind::Refines, "r3", "r1"},   {TraceKind::Refines, "r3", "r2"}, {TraceKind::Requires, "r4", "r5"}};
  auto got = r.traces;
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  // r3 refines r1 is entailed (AdhesiveBondedBracket is a Bracket) and is not
  // implied by any other kept trace, so it survives the reduction.
  EXPECT_EQ(got, expected);
  EXPECT_GT(r.detected.size(), r.traces.size());
}

TEST(DlPipeline, EmptyInputAndBadLines) {
  DlResult empty = dl_pipeline("", lexicon(), ontology());
  EXPECT_TRUE(empty.sentences.empty());
  EXPECT_TRUE(empty.traces.empty());

  DlResult mixed = dl_pipeline("a: Bracket shall be used in hydraulic area\nb: colourless green ideas\n"
                               "c: Bracket shall be installed in fuel tank\n",
                               lexicon(), ontology());
  ASSERT_EQ(mixed.sentences.size(), 3u);
  EXPECT_EQ(mixed.sentences[1].status, "failure");
  EXPECT_FALSE(mixed.sentences[1].axiom.has_value());
  EXPECT_EQ(mixed.traces, (std::vector<DetectedTrace>{{TraceKind::Conflicts, "a", "c"}}));
}

TEST(DlPipeline, WorkspaceExport) {
  DlResult r = dl_pipeline(testing::data("table1.sentences.txt"), lexicon(), ontology());
  trace::TraceabilityInformation info = to_workspace(r, "table1.sentences.txt");
  EXPECT_EQ(info.locations.size(), 6u);
  const auto& r1 = std::get<trace::TextSpan>(info.locations.at("r1").kind);
  EXPECT_EQ(r1.offset, 4);
  EXPECT_EQ(r1.length, 45);
  EXPECT_EQ(info.types.at("r6"), "Requirement");
  EXPECT_TRUE(info.find_link("conflicts", {"r5", "r6"}).has_value());
  EXPECT_TRUE(info.find_link("conflicts", {"r6", "r5"}).has_value());
  EXPECT_EQ(info.links.at("refines-r3-r1").provenance, trace::Provenance::DL);
  EXPECT_EQ(info.links.size(), 7u);
  EXPECT_NO_THROW(trace::to_relational(info, testing::sidp_spec()));
  EXPECT_EQ(trace::load(trace::save(info)), info);
}

}  // namespace
}  // namespace tracer::pipeline
