#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tracer/forl.hpp"
#include "tracer/relational.hpp"
#include "tracer/sat.hpp"

namespace tracer::ground {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { False, True, Var, Not, And, Or };

struct Node {
  NodeKind kind = NodeKind::False;
  int var = 0;                  // Var: 1-based propositional variable
  std::vector<NodeId> inputs;   // Not: one input; And/Or: sorted, duplicate-free, at least two
};

// Hash-consed boolean DAG. Node ids are topologically ordered: every input id
// is smaller than the id of the node that uses it.
class BoolCircuit {
 public:
  static constexpr NodeId kFalse = 0;
  static constexpr NodeId kTrue = 1;

  BoolCircuit();

  NodeId constant(bool value) const noexcept { return value ? kTrue : kFalse; }
  NodeId var(int v);
  NodeId make_not(NodeId a);
  NodeId make_and(std::vector<NodeId> inputs);
  NodeId make_or(std::vector<NodeId> inputs);
  NodeId make_and(NodeId a, NodeId b) { return make_and(std::vector<NodeId>{a, b}); }
  NodeId make_or(NodeId a, NodeId b) { return make_or(std::vector<NodeId>{a, b}); }
  NodeId make_implies(NodeId a, NodeId b) { return make_or(make_not(a), b); }
  NodeId make_iff(NodeId a, NodeId b);

  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool is_constant(NodeId id) const noexcept { return id <= kTrue; }

  // Evaluates `id` under a 1-based assignment (index 0 unused).
  bool evaluate(NodeId id, const std::vector<bool>& assignment) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<int, std::vector<NodeId>>& k) const noexcept;
  };

  NodeId intern(Node n);

  std::vector<Node> nodes_;
  std::unordered_map<std::pair<int, std::vector<NodeId>>, NodeId, KeyHash> table_;
  std::unordered_map<int, NodeId> vars_;
};

// Tuple <-> variable mapping for one set of bounds. Only tuples in
// upper \ lower receive a variable; numbering follows relation declaration
// order and then tuple order, starting at 1.
class VarMap {
 public:
  VarMap() = default;
  explicit VarMap(const rel::Bounds& bounds);

  int num_vars() const noexcept { return static_cast<int>(entries_.size()); }
  // 0 when the tuple has no variable.
  int find(std::string_view relation, const rel::Tuple& t) const;
  const std::pair<std::string, rel::Tuple>& tuple_of(int var) const { return entries_.at(var - 1); }
  // Variables of one relation, in allocation order.
  std::vector<int> vars_of(std::string_view relation) const;

  // Relation values of a model: lower bound plus every tuple whose variable is true.
  rel::Valuation decode(const rel::Bounds& bounds, const std::vector<bool>& assignment) const;

 private:
  std::vector<std::pair<std::string, rel::Tuple>> entries_;
  std::map<std::string, std::map<rel::Tuple, int>, std::less<>> index_;
};

struct Grounding {
  BoolCircuit circuit;
  VarMap vars;
  NodeId root = BoolCircuit::kTrue;
  std::vector<NodeId> fact_roots;  // parallel to the facts passed to ground()
};

Grounding ground(const std::vector<const forl::TypedFact*>& facts, const rel::Bounds& bounds);

// Sparse boolean matrix over tuples of one arity; absent cells are FALSE.
// Cells are keyed by the base-|universe| code of the tuple.
struct Matrix {
  int arity = 1;
  std::map<std::uint64_t, NodeId> cells;
};

// Grounds formulas into an existing circuit, so that facts can be added
// incrementally against one variable map.
class Grounder {
 public:
  Grounder(BoolCircuit& circuit, const VarMap& vars, const rel::Bounds& bounds);

  NodeId formula(const forl::Formula& f);
  Matrix expr(const forl::Expr& e);

  std::uint64_t encode(const rel::Tuple& t) const;
  rel::Tuple decode(std::uint64_t code, int arity) const;

 private:
  Matrix relation(const std::string& name, int arity);
  Matrix join(const Matrix& a, const Matrix& b);
  Matrix unite(const Matrix& a, const Matrix& b);
  Matrix closure(const Matrix& m);
  NodeId subset(const Matrix& a, const Matrix& b);
  NodeId cardinality(forl::Mult mult, const Matrix& m);

  BoolCircuit& circuit_;
  const VarMap& vars_;
  const rel::Bounds& bounds_;
  std::uint64_t base_;
  std::map<std::string, rel::Atom, std::less<>> env_;
};

struct CnfOptions {
  // Emit only the implication directions each node's polarity needs.
  bool plaisted_greenbaum = false;
};

// Tseitin encoder that remembers which nodes already have definitional
// clauses, so it can feed an incremental solver. Variables 1..num_tuple_vars
// keep their tuple meaning; auxiliaries are allocated after them.
class TseitinEncoder {
 public:
  TseitinEncoder(const BoolCircuit& circuit, int num_tuple_vars, CnfOptions options = {});

  // Appends clauses asserting `id`. A FALSE root becomes the pair {x}, {-x}.
  void assert_node(NodeId id, sat::CnfFormula& out);
  // Literal equivalent to `id` (in the required polarity); `id` must not be constant.
  sat::Lit literal(NodeId id, bool positive, sat::CnfFormula& out);
  int num_vars() const noexcept { return next_var_ - 1; }
  const std::unordered_map<NodeId, int>& aux() const noexcept { return aux_; }

 private:
  const BoolCircuit& circuit_;
  CnfOptions options_;
  int next_var_;
  std::unordered_map<NodeId, int> aux_;
  std::unordered_map<NodeId, std::uint8_t> emitted_;  // bit 0: positive, bit 1: negative
};

// Equisatisfiable CNF asserting `root`; constant TRUE yields no clauses.
sat::CnfFormula to_cnf(const BoolCircuit& circuit, NodeId root, int num_tuple_vars, CnfOptions options = {});

}  // namespace tracer::ground
