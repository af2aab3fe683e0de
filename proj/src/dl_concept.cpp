#include <algorithm>
#include <cctype>

#include "tracer/dl.hpp"
#include "tracer/error.hpp"

namespace tracer::dl {

namespace {

ConceptPtr make(ConceptKind kind, std::string name = {}, Role role = {}, std::vector<ConceptPtr> args = {}) {
  auto c = std::make_shared<Concept>();
  c->kind = kind;
  c->name = std::move(name);
  c->role = std::move(role);
  c->args = std::move(args);
  return c;
}

ConceptPtr nary(ConceptKind kind, std::vector<ConceptPtr> cs) {
  const ConceptKind unit = kind == ConceptKind::And ? ConceptKind::Top : ConceptKind::Bottom;
  const ConceptKind zero = kind == ConceptKind::And ? ConceptKind::Bottom : ConceptKind::Top;
  std::vector<std::pair<std::string, ConceptPtr>> keyed;
  std::vector<ConceptPtr> pending = std::move(cs);
  while (!pending.empty()) {
    ConceptPtr c = std::move(pending.back());
    pending.pop_back();
    if (c->kind == kind) {
      pending.insert(pending.end(), c->args.begin(), c->args.end());
      continue;
    }
    if (c->kind == unit) continue;
    if (c->kind == zero) return c;
    keyed.emplace_back(to_string(c), std::move(c));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  if (keyed.empty()) return unit == ConceptKind::Top ? top() : bottom();
  if (keyed.size() == 1) return keyed.front().second;
  std::vector<ConceptPtr> args;
  args.reserve(keyed.size());
  for (auto& [key, c] : keyed) args.push_back(std::move(c));
  return make(kind, {}, {}, std::move(args));
}

void print(const ConceptPtr& c, std::string& out) {
  switch (c->kind) {
    case ConceptKind::Top: out += "top"; return;
    case ConceptKind::Bottom: out += "bottom"; return;
    case ConceptKind::Atomic: out += c->name; return;
    case ConceptKind::Not:
      out += "not(";
      print(c->args[0], out);
      out += ')';
      return;
    case ConceptKind::And:
    case ConceptKind::Or:
      out += c->kind == ConceptKind::And ? "and(" : "or(";
      for (std::size_t i = 0; i < c->args.size(); ++i) {
        if (i) out += ' ';
        print(c->args[i], out);
      }
      out += ')';
      return;
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      out += c->kind == ConceptKind::Exists ? "some(" : "all(";
      out += to_string(c->role);
      out += ' ';
      print(c->args[0], out);
      out += ')';
      return;
  }
}

// Recursive-descent reader over the prefix syntax.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  ConceptPtr read_concept() {
    std::string word = identifier();
    if (word == "top" || word == "owl:Thing") return top();
    if (word == "bottom" || word == "owl:Nothing") return bottom();
    if (word == "not" || word == "and" || word == "or" || word == "some" || word == "all") {
      expect('(');
      ConceptPtr result;
      if (word == "not") {
        result = negate(read_concept());
      } else if (word == "some" || word == "all") {
        Role r = role();
        ConceptPtr filler = read_concept();
        result = word == "some" ? exists(std::move(r), std::move(filler)) : forall(std::move(r), std::move(filler));
      } else {
        std::vector<ConceptPtr> args;
        while (!peek(')')) args.push_back(read_concept());
        if (args.empty()) fail("expected at least one concept");
        result = word == "and" ? conj(std::move(args)) : disj(std::move(args));
      }
      expect(')');
      return result;
    }
    return atomic(std::move(word));
  }

  Role role() {
    std::string word = identifier();
    if (word == "inv" && peek('(')) {
      expect('(');
      Role r = role();
      expect(')');
      return r.inv();
    }
    return Role{std::move(word), false};
  }

  void finish() {
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      unsigned char ch = static_cast<unsigned char>(text_[pos_]);
      if (!(std::isalnum(ch) || ch == '_' || ch == ':' || ch == '-' || ch == '.')) break;
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::MalformedDocument, "column " + std::to_string(pos_ + 1) + ": " + message);
  }

 private:
  void skip() {
    while (pos_ < text_.size() && (std::isspace(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == ',')) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Role& r) { return r.inverse ? "inv(" + r.name + ")" : r.name; }

ConceptPtr top() {
  static const ConceptPtr t = make(ConceptKind::Top);
  return t;
}

ConceptPtr bottom() {
  static const ConceptPtr b = make(ConceptKind::Bottom);
  return b;
}

ConceptPtr atomic(std::string name) {
  if (name.empty()) throw Error(ErrorKind::InvalidArgument, "atomic concept needs a name");
  return make(ConceptKind::Atomic, std::move(name));
}

ConceptPtr negate(ConceptPtr c) {
  switch (c->kind) {
    case ConceptKind::Top: return bottom();
    case ConceptKind::Bottom: return top();
    case ConceptKind::Not: return c->args[0];
    default: return make(ConceptKind::Not, {}, {}, {std::move(c)});
  }
}

ConceptPtr conj(std::vector<ConceptPtr> cs) { return nary(ConceptKind::And, std::move(cs)); }
ConceptPtr disj(std::vector<ConceptPtr> cs) { return nary(ConceptKind::Or, std::move(cs)); }

ConceptPtr exists(Role r, ConceptPtr filler) {
  if (filler->kind == ConceptKind::Bottom) return bottom();
  return make(ConceptKind::Exists, {}, std::move(r), {std::move(filler)});
}

ConceptPtr forall(Role r, ConceptPtr filler) {
  if (filler->kind == ConceptKind::Top) return top();
  return make(ConceptKind::Forall, {}, std::move(r), {std::move(filler)});
}

ConceptPtr nnf(const ConceptPtr& c) {
  switch (c->kind) {
    case ConceptKind::Top:
    case ConceptKind::Bottom:
    case ConceptKind::Atomic: return c;
    case ConceptKind::And:
    case ConceptKind::Or: {
      std::vector<ConceptPtr> args;
      for (const auto& a : c->args) args.push_back(nnf(a));
      return c->kind == ConceptKind::And ? conj(std::move(args)) : disj(std::move(args));
    }
    case ConceptKind::Exists: return exists(c->role, nnf(c->args[0]));
    case ConceptKind::Forall: return forall(c->role, nnf(c->args[0]));
    case ConceptKind::Not: break;
  }
  const ConceptPtr& d = c->args[0];
  switch (d->kind) {
    case ConceptKind::Top: return bottom();
    case ConceptKind::Bottom: return top();
    case ConceptKind::Atomic: return c;
    case ConceptKind::Not: return nnf(d->args[0]);
    case ConceptKind::And:
    case ConceptKind::Or: {
      std::vector<ConceptPtr> args;
      for (const auto& a : d->args) args.push_back(nnf(negate(a)));
      return d->kind == ConceptKind::And ? disj(std::move(args)) : conj(std::move(args));
    }
    case ConceptKind::Exists: return forall(d->role, nnf(negate(d->args[0])));
    case ConceptKind::Forall: return exists(d->role, nnf(negate(d->args[0])));
  }
  return c;
}

std::string to_string(const ConceptPtr& c) {
  std::string out;
  print(c, out);
  return out;
}

ConceptPtr parse_concept(std::string_view text) {
  Reader r(text);
  ConceptPtr c = r.read_concept();
  r.finish();
  return c;
}

Role parse_role(std::string_view text) {
  Reader r(text);
  Role role = r.role();
  r.finish();
  return role;
}

bool equal(const ConceptPtr& a, const ConceptPtr& b) { return a == b || to_string(a) == to_string(b); }

std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Conflicts: return "conflicts";
    case TraceKind::Refines: return "refines";
    case TraceKind::Requires: return "requires";
    case TraceKind::Equals: return "equals";
  }
  return "?";
}

}  // namespace tracer::dl
