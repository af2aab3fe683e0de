#include <array>
#include <cstdio>

#include "forl_lexer.hpp"
#include "tracer/error.hpp"
#include "tracer/forl.hpp"

namespace tracer::forl {

namespace {

struct Rejected {
  std::string_view word;
  std::string_view reason;
};

constexpr std::array kRejected = {
    Rejected{"let", "let bindings are not part of the language"},
    Rejected{"pred", "predicates are not part of the language; state constraints as facts"},
    Rejected{"fun", "functions are not part of the language; inline the expression"},
    Rejected{"open", "modules are not supported"},
    Rejected{"module", "modules are not supported"},
    Rejected{"run", "commands are not supported; analyses are driven by the tool"},
    Rejected{"check", "commands are not supported; analyses are driven by the tool"},
    Rejected{"assert", "assertions are not supported; analyses are driven by the tool"},
    Rejected{"ordering", "ordered signatures are not supported"},
    Rejected{"Int", "integer expressions are not supported"},
    Rejected{"int", "integer expressions are not supported"},
    Rejected{"sum", "integer expressions are not supported"},
    Rejected{"seq", "sequences are not supported"},
    Rejected{"enum", "enumerations are not supported"},
    Rejected{"disj", "disjoint declarations are not supported"},
    Rejected{"else", "conditional formulas are not supported"},
    Rejected{"this", "'this' is not supported; fields are global relations"},
    Rejected{"private", "visibility modifiers are not supported"},
};

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  SpecAst parse_spec() {
    SpecAst ast;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == Tok::Reason) {
        ast.facts.push_back(parse_annotated_fact());
      } else if (at_keyword("abstract") || at_keyword("sig")) {
        parse_sigs(ast.sigs);
      } else if (at_keyword("fact")) {
        ast.facts.push_back(parse_fact(std::nullopt));
      } else {
        check_rejected(t);
        fail(t, "'sig', 'fact' or 'Reason@'");
      }
    }
    return ast;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        const Token& t = p.peek();
        throw SyntaxError(t.line, t.col, "shallower nesting", "nesting deeper than 200 levels");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool at_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Punct && t.text == p;
  }
  bool at_keyword(std::string_view k, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Keyword && t.text == k;
  }
  Span span() const { return {peek().line, peek().col}; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) pos_++;
    return t;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Ident: return "identifier '" + t.text + "'";
      case Tok::Keyword: return "keyword '" + t.text + "'";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(const Token& t, const std::string& expected) const {
    throw SyntaxError(t.line, t.col, expected, "expected " + expected + ", found " + describe(t));
  }

  static void check_rejected(const Token& t) {
    if (t.kind != Tok::Ident) return;
    for (const auto& r : kRejected) {
      if (r.word == t.text) {
        throw SyntaxError(t.line, t.col, "supported construct",
                          "'" + t.text + "' is not supported: " + std::string(r.reason));
      }
    }
  }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) fail(peek(), "'" + std::string(p) + "'");
    next();
  }
  void expect_keyword(std::string_view k) {
    if (!at_keyword(k)) fail(peek(), "'" + std::string(k) + "'");
    next();
  }
  std::string expect_ident(const std::string& what) {
    const Token& t = peek();
    check_rejected(t);
    if (t.kind != Tok::Ident) fail(t, what);
    return next().text;
  }

  // ---- declarations ----------------------------------------------------

  void parse_sigs(std::vector<SigDecl>& out) {
    Span start = span();
    bool is_abstract = false;
    if (at_keyword("abstract")) {
      next();
      is_abstract = true;
    }
    expect_keyword("sig");
    std::vector<std::pair<std::string, Span>> names;
    names.emplace_back(std::string(), span());
    names.back().first = expect_ident("signature name");
    while (at_punct(",")) {
      next();
      Span s = span();
      names.emplace_back(expect_ident("signature name"), s);
    }
    SigKind kind = SigKind::TopLevel;
    std::vector<std::string> parents;
    if (at_keyword("extends")) {
      next();
      kind = SigKind::Extends;
      parents.push_back(expect_ident("parent signature"));
    } else if (at_keyword("in")) {
      next();
      kind = SigKind::SubsetOf;
      parents.push_back(expect_ident("parent signature"));
      while (at_punct("+")) {
        next();
        parents.push_back(expect_ident("parent signature"));
      }
    }
    expect_punct("{");
    std::vector<FieldDecl> fields;
    if (!at_punct("}")) {
      for (;;) {
        parse_field_group(fields);
        if (!at_punct(",")) break;
        next();
      }
    }
    expect_punct("}");
    for (std::size_t k = 0; k < names.size(); ++k) {
      SigDecl sig;
      sig.name = names[k].first;
      sig.is_abstract = is_abstract;
      sig.kind = kind;
      sig.parents = parents;
      sig.span = k == 0 ? start : names[k].second;
      if (k == 0) {
        sig.fields = fields;
        for (auto& f : sig.fields) f.columns.insert(f.columns.begin(), sig.name);
      } else if (!fields.empty()) {
        // A field belongs to exactly one owner; repeat declarations would clash.
        throw SyntaxError(names[k].second.line, names[k].second.col, "single signature name",
                          "fields cannot be declared for several signatures at once");
      }
      out.push_back(std::move(sig));
    }
  }

  static bool is_mult_keyword(const Token& t) {
    return t.kind == Tok::Keyword &&
           (t.text == "lone" || t.text == "some" || t.text == "one" || t.text == "set");
  }
  static Mult mult_of(std::string_view text) {
    if (text == "lone") return Mult::Lone;
    if (text == "some") return Mult::Some;
    if (text == "one") return Mult::One;
    if (text == "no") return Mult::No;
    return Mult::Set;
  }

  void parse_field_group(std::vector<FieldDecl>& out) {
    std::vector<std::pair<std::string, Span>> names;
    Span s = span();
    names.emplace_back(expect_ident("field name"), s);
    while (at_punct(",")) {
      next();
      s = span();
      names.emplace_back(expect_ident("field name"), s);
    }
    expect_punct(":");
    std::optional<Mult> mult;
    Span mult_span = span();
    if (is_mult_keyword(peek())) mult = mult_of(next().text);
    std::vector<std::string> columns;
    columns.push_back(expect_ident("signature name"));
    for (;;) {
      if (is_mult_keyword(peek())) {
        const Token& t = peek();
        throw SyntaxError(t.line, t.col, "'->' or end of field",
                          "multiplicity pairs are restricted to binary fields");
      }
      if (!at_punct("->")) break;
      Span arrow = span();
      next();
      if (mult || is_mult_keyword(peek())) {
        Span at = mult ? mult_span : arrow;
        throw SyntaxError(at.line, at.col, "signature name",
                          "multiplicity pairs are restricted to binary fields");
      }
      columns.push_back(expect_ident("signature name"));
    }
    for (auto& [name, at] : names) {
      FieldDecl f;
      f.name = name;
      f.columns = columns;
      f.m = Mult::Set;
      f.n = columns.size() == 1 ? mult.value_or(Mult::One) : Mult::Set;
      f.span = at;
      out.push_back(std::move(f));
    }
  }

  FactDecl parse_annotated_fact() {
    const Token& r = peek();
    if (!r.starts_line) fail(r, "'Reason@' at the start of a line");
    next();
    std::vector<std::string> targets;
    targets.push_back(expect_ident("relation name"));
    while (at_punct(",")) {
      next();
      targets.push_back(expect_ident("relation name"));
    }
    if (!at_keyword("fact") || !peek().starts_line) fail(peek(), "'fact' on the line after the annotation");
    return parse_fact(std::move(targets));
  }

  FactDecl parse_fact(std::optional<std::vector<std::string>> reason) {
    FactDecl fact;
    fact.span = span();
    fact.reason = std::move(reason);
    expect_keyword("fact");
    if (peek().kind == Tok::Ident) fact.name = expect_ident("fact name");
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_end()) fail(peek(), "'}'");
      fact.body.push_back(parse_formula());
    }
    next();
    return fact;
  }

  // ---- formulas --------------------------------------------------------

  bool at_quantifier() const {
    if (!(at_keyword("all") || at_keyword("some") || at_keyword("no"))) return false;
    return peek(1).kind == Tok::Ident && (at_punct(":", 2) || at_punct(",", 2));
  }

  FormulaPtr parse_formula() {
    DepthGuard guard(*this);
    if (at_quantifier()) return parse_quant();
    return parse_or();
  }

  FormulaPtr parse_quant() {
    Span start = span();
    std::string word = next().text;
    Quantifier q = word == "all" ? Quantifier::All : word == "some" ? Quantifier::Some : Quantifier::No;
    std::vector<std::pair<std::string, ExprPtr>> vars;
    std::vector<Span> var_spans;
    for (;;) {
      std::vector<std::pair<std::string, Span>> group;
      Span s = span();
      group.emplace_back(expect_ident("variable name"), s);
      while (at_punct(",")) {
        next();
        s = span();
        group.emplace_back(expect_ident("variable name"), s);
      }
      expect_punct(":");
      ExprPtr bound = parse_expr();
      for (auto& [name, at] : group) {
        vars.emplace_back(name, bound);
        var_spans.push_back(at);
      }
      if (!at_punct(",")) break;
      next();
    }
    FormulaPtr body;
    if (at_punct("|")) {
      next();
      body = parse_formula();
    } else if (at_punct("{")) {
      body = parse_block();
    } else {
      fail(peek(), "'|' or '{'");
    }
    // `no x, y: e | F` means no pair satisfies F.
    for (std::size_t k = vars.size(); k-- > 0;) {
      Quantifier here = q;
      if (q == Quantifier::No && k > 0) here = Quantifier::Some;
      body = make_quant(here, vars[k].first, vars[k].second, body, k == 0 ? start : var_spans[k]);
    }
    return body;
  }

  FormulaPtr parse_block() {
    Span start = span();
    expect_punct("{");
    std::vector<FormulaPtr> items;
    while (!at_punct("}")) {
      if (at_end()) fail(peek(), "'}'");
      items.push_back(parse_formula());
    }
    next();
    if (items.empty()) {
      throw SyntaxError(start.line, start.col, "formula", "empty formula block");
    }
    FormulaPtr acc = items[0];
    for (std::size_t k = 1; k < items.size(); ++k) acc = make_binary(FormulaOp::And, acc, items[k], start);
    return acc;
  }

  FormulaPtr parse_or() {
    FormulaPtr left = parse_iff();
    while (at_keyword("or") || at_punct("||")) {
      Span s = span();
      next();
      left = make_binary(FormulaOp::Or, left, parse_iff_or_quant(), s);
    }
    return left;
  }

  // A quantifier may close any binary chain; its body extends to the right.
  FormulaPtr parse_iff_or_quant() { return at_quantifier() ? parse_quant() : parse_iff(); }

  FormulaPtr parse_iff() {
    FormulaPtr left = parse_implies();
    while (at_keyword("iff") || at_punct("<=>")) {
      Span s = span();
      next();
      left = make_binary(FormulaOp::Iff, left, at_quantifier() ? parse_quant() : parse_implies(), s);
    }
    return left;
  }

  FormulaPtr parse_implies() {
    FormulaPtr left = parse_and();
    if (at_keyword("implies") || at_punct("=>")) {
      Span s = span();
      next();
      DepthGuard guard(*this);
      FormulaPtr right = at_quantifier() ? parse_quant() : parse_implies();
      return make_binary(FormulaOp::Implies, left, right, s);
    }
    return left;
  }

  FormulaPtr parse_and() {
    FormulaPtr left = parse_unary();
    while (at_keyword("and") || at_punct("&&")) {
      Span s = span();
      next();
      left = make_binary(FormulaOp::And, left, parse_unary(), s);
    }
    return left;
  }

  FormulaPtr parse_unary() {
    DepthGuard guard(*this);
    if (at_keyword("not") || at_punct("!")) {
      Span s = span();
      next();
      return make_not(parse_unary(), s);
    }
    if (at_quantifier()) return parse_quant();
    return parse_atomic();
  }

  FormulaPtr parse_atomic() {
    if (at_punct("{")) return parse_block();
    if (at_punct("(")) {
      std::size_t saved = pos_;
      int saved_depth = depth_;
      try {
        next();
        FormulaPtr inner = parse_formula();
        expect_punct(")");
        return inner;
      } catch (const SyntaxError&) {
        pos_ = saved;
        depth_ = saved_depth;
      }
    }
    const Token& t = peek();
    if (t.kind == Tok::Keyword && (t.text == "no" || t.text == "some" || t.text == "lone" || t.text == "one")) {
      Span s = span();
      Mult m = mult_of(next().text);
      return make_mult(m, parse_expr(), s);
    }
    ExprPtr left = parse_expr();
    Span s = span();
    if (at_keyword("in")) {
      next();
      return make_compare(FormulaOp::In, left, parse_expr(), s);
    }
    if (at_punct("=")) {
      next();
      return make_compare(FormulaOp::Equal, left, parse_expr(), s);
    }
    if (at_punct("!=")) {
      next();
      return make_not(make_compare(FormulaOp::Equal, left, parse_expr(), s), s);
    }
    if ((at_keyword("not") || at_punct("!")) && at_keyword("in", 1)) {
      next();
      next();
      return make_not(make_compare(FormulaOp::In, left, parse_expr(), s), s);
    }
    fail(peek(), "'in', '=' or '!='");
  }

  // ---- expressions -----------------------------------------------------

  ExprPtr parse_expr() {
    DepthGuard guard(*this);
    ExprPtr left = parse_intersect();
    while (at_punct("+") || at_punct("-")) {
      Span s = span();
      ExprOp op = next().text == "+" ? ExprOp::Union : ExprOp::Difference;
      left = make_binary(op, left, parse_intersect(), s);
    }
    return left;
  }

  ExprPtr parse_intersect() {
    ExprPtr left = parse_product();
    while (at_punct("&")) {
      Span s = span();
      next();
      left = make_binary(ExprOp::Intersect, left, parse_product(), s);
    }
    return left;
  }

  ExprPtr parse_product() {
    ExprPtr left = parse_join();
    while (at_punct("->")) {
      Span s = span();
      next();
      left = make_binary(ExprOp::Product, left, parse_join(), s);
    }
    return left;
  }

  ExprPtr parse_join() {
    ExprPtr left = parse_unary_expr();
    while (at_punct(".")) {
      Span s = span();
      next();
      left = make_binary(ExprOp::Join, left, parse_unary_expr(), s);
    }
    return left;
  }

  ExprPtr parse_unary_expr() {
    DepthGuard guard(*this);
    Span s = span();
    if (at_punct("~")) {
      next();
      return make_unary(ExprOp::Transpose, parse_unary_expr(), s);
    }
    if (at_punct("^")) {
      next();
      return make_unary(ExprOp::Closure, parse_unary_expr(), s);
    }
    if (at_punct("*")) {
      next();
      return make_unary(ExprOp::ReflexiveClosure, parse_unary_expr(), s);
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    Span s = span();
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      check_rejected(t);
      return make_name(next().text, s);
    }
    if (at_keyword("univ")) {
      next();
      return make_constant(ExprOp::Univ, s);
    }
    if (at_keyword("iden")) {
      next();
      return make_constant(ExprOp::Iden, s);
    }
    if (at_keyword("none")) {
      next();
      return make_constant(ExprOp::None, s);
    }
    if (at_punct("(")) {
      next();
      ExprPtr inner = parse_expr();
      expect_punct(")");
      return inner;
    }
    fail(t, "expression");
  }
};

}  // namespace

SpecAst parse_spec(std::string_view text) {
  Parser parser(lex(text));
  return parser.parse_spec();
}

}  // namespace tracer::forl
