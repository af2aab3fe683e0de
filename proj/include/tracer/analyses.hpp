#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tracer/forl.hpp"
#include "tracer/relational.hpp"
#include "tracer/sat.hpp"
#include "tracer/trace_model.hpp"

namespace tracer::analysis {

enum class Verdict { Consistent, Inconsistent, Solutions };

std::string_view to_string(Verdict v);

struct InferredTuple {
  std::string relation;
  std::vector<std::string> tuple;  // atom names
  std::string provenance = "RL";

  friend bool operator==(const InferredTuple&, const InferredTuple&) = default;
  friend auto operator<=>(const InferredTuple&, const InferredTuple&) = default;
};

// What discovery proposes for one fresh atom.
struct Suggestion {
  std::string atom;
  std::vector<std::string> sigs;      // most specific sigs the atom joins
  std::vector<InferredTuple> links;   // field tuples mentioning the atom

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct Stats {
  int vars = 0;
  std::size_t clauses = 0;
  double ms = 0;
  int refinements = 0;  // lazy-instantiation rounds
};

struct Solution {
  std::vector<InferredTuple> inferred;
  std::vector<Suggestion> suggestions;
};

class ModelSearch;

// Alternative subset-minimal solutions, produced on demand. The solution
// already stored in the report is never produced again.
class SolutionIterator {
 public:
  SolutionIterator();
  SolutionIterator(std::unique_ptr<ModelSearch> search, std::function<Solution(const std::vector<bool>&)> decode);
  ~SolutionIterator();
  SolutionIterator(SolutionIterator&&) noexcept;
  SolutionIterator& operator=(SolutionIterator&&) noexcept;

  std::optional<Solution> next();

 private:
  std::unique_ptr<ModelSearch> search_;
  std::function<Solution(const std::vector<bool>&)> decode_;
};

struct AnalysisReport {
  std::string mode;  // consistency | infer | discover
  Verdict verdict = Verdict::Consistent;
  std::vector<std::string> violated;
  std::vector<InferredTuple> inferred;
  std::vector<Suggestion> suggestions;
  Stats stats;
  std::shared_ptr<SolutionIterator> solutions;  // set for infer and discover
};

enum class Engine { Sat, Horn };
enum class Grounding { Lazy, Eager };

struct InferOptions {
  Engine engine = Engine::Sat;
  // Lazy: Horn facts are instantiated only where a candidate model violates them.
  Grounding grounding = Grounding::Lazy;
  sat::SolverConfig solver = sat::SolverConfig::from_environment();
};

// Facts used by each mode: consistency takes every fact without Reason@;
// inference also takes the Reason@ facts naming one of the targets.
std::vector<const forl::TypedFact*> consistency_facts(const forl::TypedSpec& spec);
std::vector<const forl::TypedFact*> inference_facts(const forl::TypedSpec& spec, const std::vector<std::string>& targets);

AnalysisReport check_consistency(const forl::TypedSpec& spec, const rel::Instance& instance,
                                 const sat::SolverConfig& config = sat::SolverConfig::from_environment());

// Throws InconsistentPremises (message lists a conflicting fact set) or UnknownTarget.
AnalysisReport infer_relations(const forl::TypedSpec& spec, const rel::Instance& instance,
                               const std::vector<std::string>& targets, const InferOptions& options = {});

// Least fixpoint of the selected facts; only target relations may grow.
// Throws NonHornFact or InconsistentPremises.
std::map<std::string, rel::TupleSet, std::less<>> horn_fixpoint(const forl::TypedSpec& spec,
                                                                const rel::Instance& instance,
                                                                const std::vector<std::string>& targets);

// Throws InvalidArgument when fresh_count < 1 and NoSuggestion when unsatisfiable.
AnalysisReport discover_locations(const forl::TypedSpec& spec, const rel::Instance& instance, int fresh_count,
                                  bool link_fresh, const sat::SolverConfig& config = sat::SolverConfig::from_environment());

struct AcceptResult {
  trace::TraceabilityInformation info;
  std::string link_id;
  bool duplicate = false;  // the trace already existed; info is unchanged
};

// Materializes an inferred tuple as a typed link. Throws TypeViolation when the
// relation is not a field or an endpoint's type does not fit its column.
AcceptResult accept_trace(const trace::TraceabilityInformation& info, const forl::TypedSpec& spec,
                          const std::string& relation, const std::vector<std::string>& tuple,
                          trace::Provenance provenance = trace::Provenance::RL);

}  // namespace tracer::analysis
