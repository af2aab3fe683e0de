#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tracer/forl_ast.hpp"

namespace tracer::forl {

// Datalog view of a Horn-shaped fact. Variables are dense indices; every
// variable is range-restricted by at least one Rel or Univ body atom.
struct HornAtom {
  enum class Kind { Rel, Univ, Neq };
  Kind kind = Kind::Rel;
  std::string relation;  // Rel only
  std::vector<int> vars;

  friend bool operator==(const HornAtom&, const HornAtom&) = default;
};

struct HornRule {
  std::vector<HornAtom> body;
  std::optional<HornAtom> head;  // nullopt: the body must never match
  int num_vars = 0;
};

// Rules equivalent to a resolved fact formula, or nullopt when some conjunct
// falls outside the Horn fragment.
std::optional<std::vector<HornRule>> compile_horn(const Formula& resolved);

std::string to_string(const HornRule& rule);

}  // namespace tracer::forl
