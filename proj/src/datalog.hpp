#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tracer/horn_rules.hpp"
#include "tracer/relational.hpp"

namespace tracer::analysis::detail {

// Read-only view of relation values with per-column hash indexes built on
// first use. The viewed tuple sets must outlive the store and stay unchanged.
class Store {
 public:
  explicit Store(const rel::Valuation& values) : values_(values) {}

  const rel::TupleSet* get(std::string_view relation) const;
  std::size_t size(std::string_view relation) const;
  // Tuples of `relation` whose column `col` holds `atom`.
  const std::vector<const rel::Tuple*>& lookup(std::string_view relation, std::size_t col, rel::Atom atom) const;

 private:
  using Index = std::unordered_map<rel::Atom, std::vector<const rel::Tuple*>>;
  const rel::Valuation& values_;
  mutable std::map<std::pair<std::string, std::size_t>, Index, std::less<>> indexes_;
};

using Binding = std::vector<rel::Atom>;

// Calls `emit` once per assignment of rule variables that satisfies the body.
// Body atom `delta_atom` (if >= 0) is matched against `delta`, every other
// Rel atom against `full`. Univ atoms range over atoms [0, universe_size).
void match(const forl::HornRule& rule, const Store& full, const Store* delta, int delta_atom,
           std::size_t universe_size, const std::function<void(const Binding&)>& emit);

rel::Tuple instantiate(const forl::HornAtom& atom, const Binding& binding);

// Relation names (sigs and fields) a formula refers to.
std::set<std::string, std::less<>> mentioned_relations(const forl::Formula& f);

}  // namespace tracer::analysis::detail
