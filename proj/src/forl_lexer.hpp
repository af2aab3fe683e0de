#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tracer::forl {

enum class Tok {
  Ident,
  Keyword,
  Reason,  // `Reason@`
  Punct,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
  bool starts_line = false;  // first token on its source line
};

// Throws SyntaxError on characters outside the language.
std::vector<Token> lex(std::string_view text);

bool is_keyword(std::string_view word);

}  // namespace tracer::forl
