#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tracer/forl.hpp"

namespace tracer::rel {

using Atom = std::uint32_t;
using Tuple = std::vector<Atom>;

// Ordered atom list; atom indices follow insertion order.
class Universe {
 public:
  Universe() = default;
  explicit Universe(std::vector<std::string> atoms);

  Atom add(const std::string& name);  // throws InvalidArgument on duplicates
  std::optional<Atom> find(std::string_view name) const;
  Atom at(std::string_view name) const;  // throws UnknownLocation
  const std::string& name(Atom a) const { return atoms_.at(a); }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<std::string>& atoms() const noexcept { return atoms_; }

  friend bool operator==(const Universe& a, const Universe& b) { return a.atoms_ == b.atoms_; }

 private:
  std::vector<std::string> atoms_;
  std::map<std::string, Atom, std::less<>> index_;
};

class TupleSet {
 public:
  using const_iterator = std::set<Tuple>::const_iterator;

  TupleSet() = default;
  explicit TupleSet(int arity) : arity_(arity) {}
  TupleSet(int arity, std::initializer_list<Tuple> tuples);

  int arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return tuples_.size(); }
  bool empty() const noexcept { return tuples_.empty(); }
  bool contains(const Tuple& t) const { return tuples_.count(t) != 0; }
  bool insert(Tuple t);  // throws InvalidArgument on arity mismatch
  bool erase(const Tuple& t) { return tuples_.erase(t) != 0; }
  const_iterator begin() const { return tuples_.begin(); }
  const_iterator end() const { return tuples_.end(); }

  bool subset_of(const TupleSet& other) const;
  TupleSet unite(const TupleSet& other) const;
  TupleSet intersect(const TupleSet& other) const;
  TupleSet minus(const TupleSet& other) const;
  TupleSet join(const TupleSet& other) const;
  TupleSet product(const TupleSet& other) const;
  TupleSet transpose() const;
  TupleSet closure() const;

  static TupleSet unary(const std::vector<Atom>& atoms);
  static TupleSet all(std::size_t universe_size, int arity);

  friend bool operator==(const TupleSet& a, const TupleSet& b) {
    return a.arity_ == b.arity_ && a.tuples_ == b.tuples_;
  }

 private:
  int arity_ = 1;
  std::set<Tuple> tuples_;
};

using Valuation = std::map<std::string, TupleSet, std::less<>>;
using Env = std::map<std::string, Atom, std::less<>>;

// A concrete relational instance: one tuple set per relation.
struct Instance {
  Universe universe;
  Valuation relations;

  const TupleSet& value(std::string_view relation) const;  // empty set if absent
};

struct RelationBounds {
  TupleSet lower;
  TupleSet upper;
};

struct Bounds {
  Universe universe;
  std::vector<std::string> order;  // relation declaration order
  std::map<std::string, RelationBounds, std::less<>> relations;

  const RelationBounds& at(std::string_view relation) const;
  // Bound-respecting valuation with every relation at its lower bound.
  Valuation lower_valuation() const;
};

enum class Mode { Consistency, Infer, Discover };

struct BoundsMode {
  Mode mode = Mode::Consistency;
  std::vector<std::string> targets;  // Infer
  int fresh_count = 0;               // Discover
  bool link_fresh = false;           // Discover

  static BoundsMode consistency() { return {}; }
  static BoundsMode infer(std::vector<std::string> targets) { return {Mode::Infer, std::move(targets), 0, false}; }
  static BoundsMode discover(int fresh, bool link) { return {Mode::Discover, {}, fresh, link}; }
};

std::string fresh_atom_name(int index);
bool is_fresh_atom(std::string_view name);

// Throws UnknownTarget or TupleOutsideType.
Bounds build_bounds(const BoundsMode& mode, const forl::TypedSpec& spec, const Instance& instance);

// Structural invariants of Bounds; returns a description of the first violation.
std::optional<std::string> check_bounds(const Bounds& bounds, const forl::TypedSpec& spec);

TupleSet eval_expr(const forl::Expr& expr, const Valuation& valuation, const Universe& universe, const Env& env = {});
bool eval_formula(const forl::Formula& formula, const Valuation& valuation, const Universe& universe,
                  const Env& env = {});

std::string format_tuple(const Tuple& t, const Universe& universe);

}  // namespace tracer::rel
