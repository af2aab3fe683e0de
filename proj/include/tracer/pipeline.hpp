#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracer/dl.hpp"
#include "tracer/nl.hpp"
#include "tracer/trace_model.hpp"

namespace tracer::pipeline {

struct Sentence {
  std::string id;  // leading `id:` label, or `s<line>`
  std::string text;
  std::size_t line = 0;
  std::int64_t offset = 0;  // byte offset of `text` in the file
};

// One sentence per non-blank line; `#` lines are comments.
std::vector<Sentence> split_sentences(std::string_view file_text);

struct SentenceResult {
  Sentence sentence;
  std::string status;  // full | partial | failure
  std::string chunks;
  std::string flat;
  std::string reason;
  std::vector<nl::Span> skipped;
  std::optional<dl::SidpAxiom> axiom;
};

struct DlResult {
  std::vector<SentenceResult> sentences;
  std::vector<dl::DetectedTrace> detected;  // every pairwise detection
  std::vector<dl::DetectedTrace> traces;    // after reduction
};

// Drops detections implied by the others: an entailment a->b when some c
// outside the equivalence classes of a and b has a->c->b, and a conflict
// {a,b} when a or b entails a node already in conflict with the other side.
// A conflict is reported once, from the earlier to the later sentence.
std::vector<dl::DetectedTrace> reduce(const std::vector<dl::DetectedTrace>& detected);

DlResult dl_pipeline(std::string_view sentences_text, const nl::Lexicon& lexicon, const dl::Ontology& ontology,
                     const dl::ReasonerLimits& limits = {});

// A workspace with one text location per parsed sentence (typed `sig`) and
// one DL link per trace; conflicts are stored in both directions.
trace::TraceabilityInformation to_workspace(const DlResult& result, const std::string& sentences_path,
                                            const std::string& sig = "Requirement");

}  // namespace tracer::pipeline
