#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tracer::forl {

struct Span {
  int line = 0;
  int col = 0;
};

// Bounding type of an expression: a union of column products over sig names.
// The pseudo-sig "univ" stands for every atom.
struct Type {
  std::vector<std::vector<std::string>> products;

  bool empty() const noexcept { return products.empty(); }
  friend bool operator==(const Type&, const Type&) = default;
};

enum class ExprOp {
  Name,  // unresolved identifier, produced by the parser
  SigRef,
  FieldRef,
  VarRef,
  Join,
  Product,
  Union,
  Intersect,
  Difference,
  Transpose,
  Closure,
  ReflexiveClosure,
  Univ,
  Iden,
  None,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprOp op = ExprOp::None;
  std::string name;  // Name / SigRef / FieldRef / VarRef
  ExprPtr lhs;       // unary operand or left operand
  ExprPtr rhs;
  Span span;
  // Filled in by the type checker.
  int arity = 0;
  Type type;
};

enum class Mult { No, Lone, One, Some, Set };
enum class Quantifier { All, Some, No };
enum class FormulaOp { Quant, In, Equal, Mult, Not, And, Or, Implies, Iff };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaOp op = FormulaOp::And;
  Quantifier quant = Quantifier::All;  // Quant
  Mult mult = Mult::Some;              // Mult
  std::string var;                     // Quant
  ExprPtr left;                        // In/Equal left, Mult operand, Quant bound
  ExprPtr right;                       // In/Equal right
  FormulaPtr a;                        // Not operand, binary left, Quant body
  FormulaPtr b;                        // binary right
  Span span;
};

enum class SigKind { TopLevel, Extends, SubsetOf };

struct FieldDecl {
  std::string name;
  std::vector<std::string> columns;  // columns[0] is the owning sig
  Mult m = Mult::Set;
  Mult n = Mult::One;
  Span span;

  int arity() const noexcept { return static_cast<int>(columns.size()); }
};

struct SigDecl {
  std::string name;
  bool is_abstract = false;
  SigKind kind = SigKind::TopLevel;
  std::vector<std::string> parents;  // one for Extends, one or more for SubsetOf
  std::vector<FieldDecl> fields;
  Span span;
};

struct FactDecl {
  std::string name;  // empty when unnamed
  std::optional<std::vector<std::string>> reason;
  std::vector<FormulaPtr> body;
  Span span;
};

struct SpecAst {
  std::vector<SigDecl> sigs;
  std::vector<FactDecl> facts;
};

// Node constructors.
ExprPtr make_name(std::string name, Span span = {});
ExprPtr make_unary(ExprOp op, ExprPtr operand, Span span = {});
ExprPtr make_binary(ExprOp op, ExprPtr lhs, ExprPtr rhs, Span span = {});
ExprPtr make_constant(ExprOp op, Span span = {});

FormulaPtr make_quant(Quantifier q, std::string var, ExprPtr bound, FormulaPtr body, Span span = {});
FormulaPtr make_compare(FormulaOp op, ExprPtr lhs, ExprPtr rhs, Span span = {});
FormulaPtr make_mult(Mult m, ExprPtr operand, Span span = {});
FormulaPtr make_not(FormulaPtr operand, Span span = {});
FormulaPtr make_binary(FormulaOp op, FormulaPtr a, FormulaPtr b, Span span = {});

// Structural equality, ignoring spans and type annotations.
bool same(const Expr& a, const Expr& b);
bool same(const Formula& a, const Formula& b);
bool same(const SpecAst& a, const SpecAst& b);

std::string_view to_string(Mult m);
std::string_view to_string(Quantifier q);

}  // namespace tracer::forl
