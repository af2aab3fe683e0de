#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracer/error.hpp"
#include "tracer/forl_ast.hpp"

namespace tracer::forl {

// Throws SyntaxError with the position of the first offending token.
SpecAst parse_spec(std::string_view text);

// Output re-parses to a structurally equal AST.
std::string pretty_print(const SpecAst& ast);
std::string print_expr(const Expr& e);
std::string print_formula(const Formula& f);

// Per top-level conjunct classification used by the fixpoint engine.
enum class HornKind { Definite, Denial, NotHorn };

struct SigInfo {
  std::string name;
  bool is_abstract = false;
  SigKind kind = SigKind::TopLevel;
  std::vector<std::string> parents;
  std::vector<std::string> children;  // `extends` children, declaration order
  Span span;
};

struct Relation {
  std::string name;
  bool is_sig = false;
  std::vector<std::string> columns;  // sig relations have the single column {name}
  Mult m = Mult::Set;
  Mult n = Mult::Set;
  Span span;

  int arity() const noexcept { return static_cast<int>(columns.size()); }
};

struct TypedFact {
  std::string name;
  std::optional<std::vector<std::string>> reason;
  FormulaPtr formula;  // resolved and annotated; conjunction of the body
  bool implicit = false;
  HornKind horn = HornKind::NotHorn;
  Span span;

  bool annotated() const noexcept { return reason.has_value(); }
  bool targets_any(const std::vector<std::string>& relations) const;
};

class TypedSpec {
 public:
  SpecAst ast;
  std::vector<SigInfo> sigs;           // declaration order
  std::vector<Relation> relations;     // sigs first, then fields, declaration order
  std::vector<TypedFact> facts;        // user facts, then implicit facts
  std::vector<Diagnostic> warnings;

  const SigInfo* sig(std::string_view name) const;
  const Relation* relation(std::string_view name) const;
  const TypedFact* fact(std::string_view name) const;

  // True when `sub` is `sup` or reaches it through extends/subset parents.
  bool is_subsig(std::string_view sub, std::string_view sup) const;
  // Conservative: may two sigs share an atom?
  bool overlaps(std::string_view a, std::string_view b) const;
  // Concrete sigs whose atoms may belong to `name`.
  std::vector<std::string> concrete_descendants(std::string_view name) const;
  std::vector<std::string> field_names() const;
};

// Throws TypeError carrying every error diagnostic; warnings land in TypedSpec::warnings.
TypedSpec typecheck(SpecAst ast);
TypedSpec load_spec(std::string_view text);

}  // namespace tracer::forl
