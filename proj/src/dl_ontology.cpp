#include <functional>
#include <map>
#include <sstream>

#include "tracer/dl.hpp"
#include "tracer/error.hpp"

namespace tracer::dl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits the top-level arguments of `Head(a b ...)`, respecting nesting.
std::vector<std::string_view> arguments(std::string_view body) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = std::string_view::npos;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    char c = i < body.size() ? body[i] : ' ';
    bool sep = depth == 0 && (c == ' ' || c == '\t' || c == ',');
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw Error(ErrorKind::MalformedDocument, "unbalanced ')'");
    if (sep) {
      if (start != std::string_view::npos) out.push_back(body.substr(start, i - start));
      start = std::string_view::npos;
    } else if (start == std::string_view::npos) {
      start = i;
    }
  }
  if (depth != 0) throw Error(ErrorKind::MalformedDocument, "unbalanced '('");
  return out;
}

void check_acyclic(const std::vector<std::pair<Role, Role>>& inclusions) {
  std::map<std::string, std::vector<std::string>> edges;
  for (const auto& [sub, sup] : inclusions) {
    // r ⊑ s and inv(r) ⊑ inv(s) are the same axiom; compare by name with
    // orientation folded into the edge.
    edges[to_string(sub)].push_back(to_string(sup));
    edges[to_string(sub.inv())].push_back(to_string(sup.inv()));
  }
  std::map<std::string, int> state;  // 1 on stack, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    state[n] = 1;
    for (const auto& m : edges[n]) {
      if (state[m] == 1) throw Error(ErrorKind::InvalidArgument, "cyclic role hierarchy through '" + m + "'");
      if (state[m] == 0) visit(m);
    }
    state[n] = 2;
  };
  for (const auto& [n, _] : edges) {
    if (state[n] == 0) visit(n);
  }
}

}  // namespace

Ontology Ontology::without_role_inclusions() const {
  Ontology o = *this;
  o.role_inclusions.clear();
  return o;
}

Ontology parse_ontology(std::string_view text) {
  Ontology onto;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      auto open = line.find('(');
      if (open == std::string_view::npos || line.back() != ')') {
        throw Error(ErrorKind::MalformedDocument, "expected Axiom(...)");
      }
      std::string_view head = trim(line.substr(0, open));
      auto args = arguments(line.substr(open + 1, line.size() - open - 2));
      auto want = [&](std::size_t n) {
        if (args.size() != n) {
          throw Error(ErrorKind::MalformedDocument,
                      std::string(head) + " takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
        }
      };
      if (head == "SubClassOf") {
        want(2);
        onto.gcis.emplace_back(parse_concept(args[0]), parse_concept(args[1]));
      } else if (head == "DisjointClasses") {
        if (args.size() < 2) throw Error(ErrorKind::MalformedDocument, "DisjointClasses takes at least 2 arguments");
        for (std::size_t i = 0; i < args.size(); ++i) {
          for (std::size_t j = i + 1; j < args.size(); ++j) {
            onto.disjoint.emplace_back(parse_concept(args[i]), parse_concept(args[j]));
          }
        }
      } else if (head == "SubObjectPropertyOf") {
        want(2);
        onto.role_inclusions.emplace_back(parse_role(args[0]), parse_role(args[1]));
      } else if (head == "FunctionalObjectProperty") {
        want(1);
        onto.functional.insert(parse_role(args[0]));
      } else if (head == "InverseFunctionalObjectProperty") {
        want(1);
        onto.functional.insert(parse_role(args[0]).inv());
      } else {
        throw Error(ErrorKind::MalformedDocument, "unknown axiom '" + std::string(head) + "'");
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MalformedDocument) throw;
      throw Error(ErrorKind::MalformedDocument, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  check_acyclic(onto.role_inclusions);
  return onto;
}

}  // namespace tracer::dl
