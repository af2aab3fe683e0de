#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tracer::dl {

struct Role {
  std::string name;
  bool inverse = false;

  Role inv() const { return {name, !inverse}; }
  friend bool operator==(const Role&, const Role&) = default;
  friend auto operator<=>(const Role&, const Role&) = default;
};

std::string to_string(const Role& r);  // `r` or `inv(r)`

enum class ConceptKind { Top, Bottom, Atomic, Not, And, Or, Exists, Forall };

struct Concept;
using ConceptPtr = std::shared_ptr<const Concept>;

// Immutable concept tree. And/Or built through conj/disj are flattened,
// deduplicated and sorted by printed form, so equal concepts print equally.
struct Concept {
  ConceptKind kind = ConceptKind::Top;
  std::string name;               // Atomic
  Role role;                      // Exists / Forall
  std::vector<ConceptPtr> args;   // Not: 1; And/Or: >= 2; Exists/Forall: filler
};

ConceptPtr top();
ConceptPtr bottom();
ConceptPtr atomic(std::string name);
ConceptPtr negate(ConceptPtr c);
ConceptPtr conj(std::vector<ConceptPtr> cs);
ConceptPtr disj(std::vector<ConceptPtr> cs);
ConceptPtr exists(Role r, ConceptPtr filler);
ConceptPtr forall(Role r, ConceptPtr filler);

// Negation normal form: negation only in front of atomic concepts.
ConceptPtr nnf(const ConceptPtr& c);

// Prefix syntax: top, bottom, Name, not(C), and(C D ...), or(C D ...),
// some(r C), all(r C); a role is `r` or `inv(r)`.
std::string to_string(const ConceptPtr& c);
ConceptPtr parse_concept(std::string_view text);  // throws MalformedDocument
Role parse_role(std::string_view text);

bool equal(const ConceptPtr& a, const ConceptPtr& b);

struct Ontology {
  std::vector<std::pair<ConceptPtr, ConceptPtr>> gcis;      // sub, sup
  std::vector<std::pair<ConceptPtr, ConceptPtr>> disjoint;  // C ⊓ D ⊑ ⊥
  std::vector<std::pair<Role, Role>> role_inclusions;       // sub, sup
  std::set<Role> functional;

  // Same axioms with every role inclusion removed.
  Ontology without_role_inclusions() const;
};

// Line-oriented functional syntax; `#` starts a comment. Throws
// MalformedDocument with the line number, or InvalidArgument for a cyclic
// role hierarchy.
Ontology parse_ontology(std::string_view text);

struct ReasonerLimits {
  std::size_t max_nodes = 20000;  // completion-graph nodes per satisfiability test
};

// Tableau reasoner for ALCHIF with general TBoxes: atomic-left GCIs are
// unfolded lazily, the rest internalized; pairwise blocking; functional roles
// merge their neighbours. Results are cached; calls are thread-safe.
class Reasoner {
 public:
  explicit Reasoner(Ontology ontology, ReasonerLimits limits = {});
  ~Reasoner();

  // Throws ResourceLimit when the node budget is exhausted.
  bool is_satisfiable(const ConceptPtr& c);
  // True when `sub` ⊑ `sup` holds in every model of the ontology.
  bool subsumes(const ConceptPtr& sup, const ConceptPtr& sub);

  const Ontology& ontology() const noexcept { return ontology_; }

 private:
  struct Impl;
  Ontology ontology_;
  std::unique_ptr<Impl> impl_;
};

bool is_satisfiable(const ConceptPtr& c, const Ontology& onto);
bool subsumes(const ConceptPtr& sup, const ConceptPtr& sub, const Ontology& onto);

// The axiom assigned to one sentence: sub ⊑ sup, compared through phi = sub ⊓ sup.
struct SidpAxiom {
  std::string source;  // location id
  ConceptPtr sub;
  ConceptPtr sup;

  ConceptPtr phi() const { return conj({sub, sup}); }
};

enum class TraceKind { Conflicts, Refines, Requires, Equals };

std::string_view to_string(TraceKind k);

struct DetectedTrace {
  TraceKind kind;
  std::string from;
  std::string to;

  friend bool operator==(const DetectedTrace&, const DetectedTrace&) = default;
  friend auto operator<=>(const DetectedTrace&, const DetectedTrace&) = default;
};

// conflicts when phi1 ⊓ phi2 is unsatisfiable; equals on mutual entailment;
// otherwise a one-way entailment is `refines` if it holds without role
// inclusions and `requires` if it needs them.
std::vector<DetectedTrace> detect_trace(const SidpAxiom& a, const SidpAxiom& b, Reasoner& with_roles,
                                        Reasoner& without_roles);
std::vector<DetectedTrace> detect_trace(const SidpAxiom& a, const SidpAxiom& b, const Ontology& onto);

}  // namespace tracer::dl
