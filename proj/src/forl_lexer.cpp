#include "forl_lexer.hpp"

#include <cctype>
#include <cstdio>

#include "tracer/error.hpp"

namespace tracer::forl {

namespace {

constexpr std::string_view kKeywords[] = {
    "sig",  "abstract", "extends", "in",   "fact",    "all",
    "some",                   "no",       "lone",    "one",  "set",     "not",
    "and",                    "or",       "implies", "iff",  "univ",    "iden",
    "none",
};

// Longest first so that maximal munch works by scanning in order.
constexpr std::string_view kPunct[] = {
    "<=>", "=>", "->", "!=", "&&", "||", "{", "}", "(", ")", ",", ":", "|",
    ".",                     "+",  "&",  "-",  "~",  "^",  "*", "=", "!",
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_part(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\''; }

std::string describe(unsigned char c) {
  if (std::isprint(c)) return std::string("'") + static_cast<char>(c) + "'";
  char buffer[8];
  std::snprintf(buffer, sizeof buffer, "0x%02x", c);
  return std::string("byte ") + buffer;
}

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  bool line_start = true;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        line++;
        col = 1;
        line_start = true;
      } else {
        col++;
      }
    }
  };
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      advance(1);
      continue;
    }
    std::string_view rest = text.substr(i);
    if (rest.starts_with("//") || rest.starts_with("--")) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (rest.starts_with("/*")) {
      int start_line = line;
      int start_col = col;
      std::size_t close = text.find("*/", i + 2);
      if (close == std::string_view::npos) {
        throw SyntaxError(start_line, start_col, "*/", "unterminated block comment");
      }
      advance(close + 2 - i);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.col = col;
    tok.starts_line = line_start;
    line_start = false;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_part(static_cast<unsigned char>(text[j]))) j++;
      tok.text = std::string(text.substr(i, j - i));
      if (tok.text == "Reason" && j < text.size() && text[j] == '@') {
        tok.kind = Tok::Reason;
        tok.text = "Reason@";
        j++;
      } else {
        tok.kind = is_keyword(tok.text) ? Tok::Keyword : Tok::Ident;
      }
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(c)) {
      throw SyntaxError(line, col, "expression",
                        "integer literals are not supported; the language has no integer expressions");
    }
    if (c == '#') {
      throw SyntaxError(line, col, "expression",
                        "'#' (cardinality) is not supported; the language has no integer expressions");
    }
    bool matched = false;
    for (auto p : kPunct) {
      if (rest.starts_with(p)) {
        tok.kind = Tok::Punct;
        tok.text = std::string(p);
        advance(p.size());
        out.push_back(std::move(tok));
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError(line, col, "token", "unexpected character " + describe(c));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  end.starts_line = true;
  out.push_back(end);
  return out;
}

}  // namespace tracer::forl
