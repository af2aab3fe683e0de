#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracer/dl.hpp"

namespace tracer::nl {

struct NominalEntry {
  std::string surface;  // lowercase words separated by single spaces
  std::string concept_name;
};

struct VerbalEntry {
  std::string anchor;                  // e.g. "used"
  std::vector<std::string> coanchors;  // e.g. {"shall", "be"}, in surface order
  std::string role;
  bool inverse = false;
  std::string schema;
};

// Semantic schemas a verbal entry may name.
inline constexpr std::string_view kPassiveLocation = "passive_location";

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::vector<NominalEntry> nominals, std::vector<VerbalEntry> verbals);  // throws InvalidArgument

  const std::vector<NominalEntry>& nominals() const noexcept { return nominals_; }
  const std::vector<VerbalEntry>& verbals() const noexcept { return verbals_; }
  std::size_t longest_nominal() const noexcept { return longest_; }

 private:
  std::vector<NominalEntry> nominals_;
  std::vector<VerbalEntry> verbals_;
  std::size_t longest_ = 0;  // in words
};

// `{nominals:[{surface,concept}], verbals:[{anchor,coanchors,role,inverse,schema}]}`.
// Throws MalformedDocument or InvalidArgument.
Lexicon parse_lexicon(std::string_view json_text);

enum class ChunkKind { Nominal, Verbal, Preposition, Negation, Unknown };

struct Chunk {
  ChunkKind kind = ChunkKind::Unknown;
  std::size_t first_word = 0;
  std::size_t word_count = 0;
  std::string text;   // surface words as written
  std::string value;  // concept for Nominal, role for Verbal, lowercase word otherwise
  const VerbalEntry* verbal = nullptr;  // into the lexicon, which must outlive the chunk

  std::string label() const;  // [NP:Bracket], [V:use], [P:in], [NEG], [?:word]
};

std::vector<std::string> words_of(std::string_view sentence);
std::vector<Chunk> chunk_and_lex(std::string_view sentence, const Lexicon& lexicon);

struct Literal {
  enum class Kind { Subset, Exists, And, Or, Not, Top, Concept, Role, RoleInv };
  std::string label;
  Kind kind = Kind::Top;
  std::string name;                 // Concept, Role, RoleInv
  std::vector<std::string> args;    // referenced labels

  friend bool operator==(const Literal&, const Literal&) = default;
};

// Labelled literals, e.g. `l0:subset(l1,l2) l1:Bracket l2:exists(l3,l4) l3:useinv l4:HydraulicArea`.
struct FlatSemantics {
  std::vector<Literal> literals;

  friend bool operator==(const FlatSemantics&, const FlatSemantics&) = default;
};

std::string to_string(const FlatSemantics& flat);
// Reads the printed form back. Throws UnknownLiteral for an unrecognised predicate.
FlatSemantics parse_flat(std::string_view text);

struct Span {
  std::size_t first_word;
  std::size_t word_count;
  friend bool operator==(const Span&, const Span&) = default;
};

struct Full {
  FlatSemantics flat;
};
struct Partial {
  FlatSemantics flat;
  std::vector<Span> skipped;
};
struct Failure {
  std::string reason;
};
using ParseOutcome = std::variant<Full, Partial, Failure>;

// Template grammar: `NP shall [not] be V-ed [in NP]`.
ParseOutcome parse_sentence(const std::vector<Chunk>& chunks);
ParseOutcome parse_sentence(std::string_view sentence, const Lexicon& lexicon);

// Throws UnknownLiteral when a label is missing, dangling, cyclic, or used
// with the wrong kind, or when there is not exactly one subset literal.
dl::SidpAxiom flat_to_dl(const FlatSemantics& flat, std::string source = {});

}  // namespace tracer::nl
