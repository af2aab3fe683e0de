#include <sstream>

#include "tracer/forl.hpp"

namespace tracer::forl {

namespace {

int precedence(const Expr& e) {
  switch (e.op) {
    case ExprOp::Union:
    case ExprOp::Difference: return 1;
    case ExprOp::Intersect: return 2;
    case ExprOp::Product: return 3;
    case ExprOp::Join: return 4;
    case ExprOp::Transpose:
    case ExprOp::Closure:
    case ExprOp::ReflexiveClosure: return 5;
    default: return 6;
  }
}

void emit(std::ostream& out, const Expr& e, int min_prec);

void emit_child(std::ostream& out, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    out << '(';
    emit(out, e, 0);
    out << ')';
  } else {
    emit(out, e, min_prec);
  }
}

void emit(std::ostream& out, const Expr& e, int) {
  auto binary = [&](const char* symbol, int p, bool spaced) {
    emit_child(out, *e.lhs, p);
    out << (spaced ? " " : "") << symbol << (spaced ? " " : "");
    emit_child(out, *e.rhs, p + 1);
  };
  switch (e.op) {
    case ExprOp::Name:
    case ExprOp::SigRef:
    case ExprOp::FieldRef:
    case ExprOp::VarRef: out << e.name; break;
    case ExprOp::Univ: out << "univ"; break;
    case ExprOp::Iden: out << "iden"; break;
    case ExprOp::None: out << "none"; break;
    case ExprOp::Union: binary("+", 1, true); break;
    case ExprOp::Difference: binary("-", 1, true); break;
    case ExprOp::Intersect: binary("&", 2, true); break;
    case ExprOp::Product: binary("->", 3, false); break;
    case ExprOp::Join: binary(".", 4, false); break;
    case ExprOp::Transpose:
      out << '~';
      emit_child(out, *e.lhs, 5);
      break;
    case ExprOp::Closure:
      out << '^';
      emit_child(out, *e.lhs, 5);
      break;
    case ExprOp::ReflexiveClosure:
      out << '*';
      emit_child(out, *e.lhs, 5);
      break;
  }
}

int precedence(const Formula& f) {
  switch (f.op) {
    case FormulaOp::Quant: return 0;
    case FormulaOp::Or: return 1;
    case FormulaOp::Iff: return 2;
    case FormulaOp::Implies: return 3;
    case FormulaOp::And: return 4;
    case FormulaOp::Not: return 5;
    default: return 6;
  }
}

void emit(std::ostream& out, const Formula& f);

void emit_child(std::ostream& out, const Formula& f, int min_prec) {
  if (precedence(f) < min_prec) {
    out << '(';
    emit(out, f);
    out << ')';
  } else {
    emit(out, f);
  }
}

void emit(std::ostream& out, const Formula& f) {
  switch (f.op) {
    case FormulaOp::Quant: {
      out << to_string(f.quant) << ' ' << f.var;
      const Formula* body = f.a.get();
      // Re-sugar `all a: A | all b: A | F` as `all a, b: A | F`.
      while (f.quant != Quantifier::No && body->op == FormulaOp::Quant && body->quant == f.quant &&
             same(*body->left, *f.left)) {
        out << ", " << body->var;
        body = body->a.get();
      }
      out << ": ";
      emit(out, *f.left, 0);
      out << " | ";
      emit(out, *body);
      break;
    }
    case FormulaOp::In:
      emit(out, *f.left, 0);
      out << " in ";
      emit(out, *f.right, 0);
      break;
    case FormulaOp::Equal:
      emit(out, *f.left, 0);
      out << " = ";
      emit(out, *f.right, 0);
      break;
    case FormulaOp::Mult:
      out << to_string(f.mult) << ' ';
      emit(out, *f.left, 0);
      break;
    case FormulaOp::Not:
      out << "not ";
      emit_child(out, *f.a, 5);
      break;
    case FormulaOp::And:
      emit_child(out, *f.a, 4);
      out << " and ";
      emit_child(out, *f.b, 5);
      break;
    case FormulaOp::Or:
      emit_child(out, *f.a, 1);
      out << " or ";
      emit_child(out, *f.b, 2);
      break;
    case FormulaOp::Iff:
      emit_child(out, *f.a, 2);
      out << " iff ";
      emit_child(out, *f.b, 3);
      break;
    case FormulaOp::Implies:
      emit_child(out, *f.a, 4);
      out << " implies ";
      emit_child(out, *f.b, 3);
      break;
  }
}

void emit_field(std::ostream& out, const FieldDecl& f) {
  out << f.name << ": ";
  if (f.arity() == 2) {
    out << to_string(f.n) << ' ' << f.columns[1];
    return;
  }
  for (std::size_t i = 1; i < f.columns.size(); ++i) {
    if (i > 1) out << " -> ";
    out << f.columns[i];
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  emit(out, e, 0);
  return out.str();
}

std::string print_formula(const Formula& f) {
  std::ostringstream out;
  emit(out, f);
  return out.str();
}

std::string pretty_print(const SpecAst& ast) {
  std::ostringstream out;
  bool first = true;
  for (const SigDecl& sig : ast.sigs) {
    if (!first) out << '\n';
    first = false;
    if (sig.is_abstract) out << "abstract ";
    out << "sig " << sig.name;
    if (sig.kind == SigKind::Extends) {
      out << " extends " << sig.parents[0];
    } else if (sig.kind == SigKind::SubsetOf) {
      out << " in ";
      for (std::size_t i = 0; i < sig.parents.size(); ++i) out << (i ? " + " : "") << sig.parents[i];
    }
    if (sig.fields.empty()) {
      out << " {}\n";
      continue;
    }
    out << " {\n";
    for (std::size_t i = 0; i < sig.fields.size(); ++i) {
      out << "  ";
      emit_field(out, sig.fields[i]);
      out << (i + 1 < sig.fields.size() ? ",\n" : "\n");
    }
    out << "}\n";
  }
  for (const FactDecl& fact : ast.facts) {
    if (!first) out << '\n';
    first = false;
    if (fact.reason) {
      out << "Reason@ ";
      for (std::size_t i = 0; i < fact.reason->size(); ++i) out << (i ? ", " : "") << (*fact.reason)[i];
      out << '\n';
    }
    out << "fact";
    if (!fact.name.empty()) out << ' ' << fact.name;
    if (fact.body.empty()) {
      out << " {}\n";
      continue;
    }
    out << " {\n";
    for (const auto& f : fact.body) {
      out << "  ";
      emit(out, *f);
      out << '\n';
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace tracer::forl
