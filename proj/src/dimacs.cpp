#include <charconv>
#include <cstdio>
#include <string>

#include "tracer/error.hpp"
#include "tracer/sat.hpp"

namespace tracer::sat {

std::string export_dimacs(const CnfFormula& cnf) {
  std::string out = "p cnf " + std::to_string(cnf.num_vars()) + " " +
                    std::to_string(cnf.num_clauses()) + "\n";
  out.reserve(out.size() + cnf.num_literals() * 6 + cnf.num_clauses() * 2);
  char buffer[16];
  for (std::size_t i = 0; i < cnf.num_clauses(); ++i) {
    for (Lit l : cnf.clause(i)) {
      auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, l);
      out.append(buffer, end);
      out.push_back(' ');
    }
    out += "0\n";
  }
  return out;
}

namespace {

[[noreturn]] void malformed(int line, const std::string& what) {
  throw Error(ErrorKind::MalformedDocument, "line " + std::to_string(line) + ": " + what);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula cnf;
  bool have_header = false;
  long declared_vars = 0;
  long declared_clauses = 0;
  std::vector<Lit> pending;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      line++;
      i++;
      continue;
    }
    if (is_space(c)) {
      i++;
      continue;
    }
    if (c == 'c' || c == '%') {
      while (i < text.size() && text[i] != '\n') i++;
      continue;
    }
    if (c == 'p') {
      if (have_header) malformed(line, "duplicate problem line");
      std::size_t end = text.find('\n', i);
      std::string_view header = text.substr(i, end == std::string_view::npos ? text.size() - i : end - i);
      char kind[8] = {};
      std::string copy(header);
      if (std::sscanf(copy.c_str(), "p %7s %ld %ld", kind, &declared_vars, &declared_clauses) != 3 ||
          std::string_view(kind) != "cnf" || declared_vars < 0 || declared_clauses < 0) {
        malformed(line, "expected 'p cnf <vars> <clauses>'");
      }
      have_header = true;
      i += header.size();
      continue;
    }
    if (!have_header) malformed(line, "clause before problem line");
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) i++;
    long value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + i, value);
    if (ec != std::errc() || ptr != text.data() + i) {
      malformed(line, "invalid literal '" + std::string(text.substr(start, i - start)) + "'");
    }
    if (value == 0) {
      cnf.add_clause(pending);
      pending.clear();
    } else {
      if (value > declared_vars || -value > declared_vars) malformed(line, "literal exceeds declared variable count");
      pending.push_back(static_cast<Lit>(value));
    }
  }
  if (!have_header) malformed(line, "missing problem line");
  if (!pending.empty()) malformed(line, "last clause is not terminated by 0");
  if (static_cast<long>(cnf.num_clauses()) != declared_clauses) {
    malformed(line, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                        std::to_string(cnf.num_clauses()));
  }
  cnf.set_num_vars(static_cast<int>(declared_vars));
  return cnf;
}

}  // namespace tracer::sat
