#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "tracer/error.hpp"
#include "tracer/nl.hpp"

namespace tracer::nl {

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kPrepositions = {"in", "on", "at", "into", "inside", "within"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize(std::string_view phrase) {
  std::string out;
  for (const auto& w : words_of(phrase)) {
    if (!out.empty()) out += ' ';
    out += lower(w);
  }
  return out;
}

std::string join(const std::vector<std::string>& words, std::size_t first, std::size_t count) {
  std::string out;
  for (std::size_t i = first; i < first + count; ++i) {
    if (i > first) out += ' ';
    out += words[i];
  }
  return out;
}

std::string string_field(const json& j, const std::string& pointer, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorKind::MalformedDocument, pointer + ": expected string field '" + key + "'");
  }
  return it->get<std::string>();
}

// Number of words a verbal pattern covers when it matches at `at`, or 0.
// A single "not" may appear anywhere after the first coanchor.
std::size_t match_verbal(const VerbalEntry& v, const std::vector<std::string>& words, std::size_t at,
                         std::size_t& negation_at) {
  std::vector<std::string_view> pattern(v.coanchors.begin(), v.coanchors.end());
  pattern.push_back(v.anchor);
  std::size_t j = at;
  negation_at = std::string::npos;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    if (k > 0 && negation_at == std::string::npos && j < words.size() && words[j] == "not") negation_at = j++;
    if (j >= words.size() || words[j] != pattern[k]) return 0;
    ++j;
  }
  return j - at;
}

Literal lit(std::string label, Literal::Kind kind, std::string name = {}, std::vector<std::string> args = {}) {
  return Literal{std::move(label), kind, std::move(name), std::move(args)};
}

}  // namespace

Lexicon::Lexicon(std::vector<NominalEntry> nominals, std::vector<VerbalEntry> verbals)
    : nominals_(std::move(nominals)), verbals_(std::move(verbals)) {
  for (auto& n : nominals_) {
    n.surface = normalize(n.surface);
    if (n.surface.empty()) throw Error(ErrorKind::InvalidArgument, "nominal entry with an empty surface");
    if (n.concept_name.empty()) throw Error(ErrorKind::InvalidArgument, "nominal '" + n.surface + "' has no concept");
    longest_ = std::max(longest_, words_of(n.surface).size());
  }
  for (auto& v : verbals_) {
    v.anchor = normalize(v.anchor);
    for (auto& c : v.coanchors) c = normalize(c);
    if (v.anchor.empty() || v.anchor.find(' ') != std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "verbal anchor must be a single word");
    }
    if (v.role.empty()) throw Error(ErrorKind::InvalidArgument, "verbal '" + v.anchor + "' has no role");
    if (v.schema != kPassiveLocation) {
      throw Error(ErrorKind::InvalidArgument, "verbal '" + v.anchor + "' names unknown schema '" + v.schema + "'");
    }
  }
}

Lexicon parse_lexicon(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedDocument, std::string("lexicon: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::MalformedDocument, "/: expected an object");
  std::vector<NominalEntry> nominals;
  std::vector<VerbalEntry> verbals;
  const json& ns = doc.value("nominals", json::array());
  const json& vs = doc.value("verbals", json::array());
  if (!ns.is_array() || !vs.is_array()) throw Error(ErrorKind::MalformedDocument, "/: nominals and verbals must be arrays");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::string p = "/nominals/" + std::to_string(i);
    nominals.push_back({string_field(ns[i], p, "surface"), string_field(ns[i], p, "concept")});
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    std::string p = "/verbals/" + std::to_string(i);
    VerbalEntry v;
    v.anchor = string_field(vs[i], p, "anchor");
    v.role = string_field(vs[i], p, "role");
    v.schema = string_field(vs[i], p, "schema");
    if (auto it = vs[i].find("coanchors"); it != vs[i].end()) {
      if (!it->is_array()) throw Error(ErrorKind::MalformedDocument, p + "/coanchors: expected an array");
      for (const auto& c : *it) {
        if (!c.is_string()) throw Error(ErrorKind::MalformedDocument, p + "/coanchors: expected strings");
        v.coanchors.push_back(c.get<std::string>());
      }
    }
    if (auto it = vs[i].find("inverse"); it != vs[i].end()) {
      if (!it->is_boolean()) throw Error(ErrorKind::MalformedDocument, p + "/inverse: expected a boolean");
      v.inverse = it->get<bool>();
    }
    verbals.push_back(std::move(v));
  }
  return Lexicon(std::move(nominals), std::move(verbals));
}

std::string Chunk::label() const {
  switch (kind) {
    case ChunkKind::Nominal: return "[NP:" + value + "]";
    case ChunkKind::Verbal: return "[V:" + value + "]";
    case ChunkKind::Preposition: return "[P:" + value + "]";
    case ChunkKind::Negation: return "[NEG]";
    case ChunkKind::Unknown: return "[?:" + value + "]";
  }
  return "[?]";
}

std::vector<std::string> words_of(std::string_view sentence) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t start = i;
    while (i < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::string_view w = sentence.substr(start, i - start);
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.front()))) w.remove_prefix(1);
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) w.remove_suffix(1);
    if (!w.empty()) out.emplace_back(w);
  }
  return out;
}

std::vector<Chunk> chunk_and_lex(std::string_view sentence, const Lexicon& lexicon) {
  const std::vector<std::string> raw = words_of(sentence);
  std::vector<std::string> words;
  for (const auto& w : raw) words.push_back(lower(w));
  std::unordered_map<std::string, const NominalEntry*> by_surface;
  for (const auto& n : lexicon.nominals()) by_surface.emplace(n.surface, &n);

  std::vector<Chunk> out;
  std::size_t i = 0;
  while (i < words.size()) {
    bool matched = false;
    for (std::size_t len = std::min(lexicon.longest_nominal(), words.size() - i); len > 0 && !matched; --len) {
      auto it = by_surface.find(join(words, i, len));
      if (it == by_surface.end()) continue;
      out.push_back({ChunkKind::Nominal, i, len, join(raw, i, len), it->second->concept_name, nullptr});
      i += len;
      matched = true;
    }
    if (matched) continue;

    const VerbalEntry* best = nullptr;
    std::size_t best_len = 0;
    std::size_t best_neg = std::string::npos;
    for (const auto& v : lexicon.verbals()) {
      std::size_t neg = std::string::npos;
      std::size_t len = match_verbal(v, words, i, neg);
      if (len > best_len) {
        best = &v;
        best_len = len;
        best_neg = neg;
      }
    }
    if (best) {
      if (best_neg != std::string::npos) out.push_back({ChunkKind::Negation, best_neg, 1, raw[best_neg], "not", nullptr});
      out.push_back({ChunkKind::Verbal, i, best_len, join(raw, i, best_len), best->role, best});
      i += best_len;
      continue;
    }

    ChunkKind kind = ChunkKind::Unknown;
    if (kPrepositions.count(words[i])) kind = ChunkKind::Preposition;
    if (words[i] == "not") kind = ChunkKind::Negation;
    out.push_back({kind, i, 1, raw[i], words[i], nullptr});
    ++i;
  }
  return out;
}

std::string to_string(const FlatSemantics& flat) {
  std::string out;
  for (const auto& l : flat.literals) {
    if (!out.empty()) out += ' ';
    out += l.label + ':';
    auto call = [&](std::string_view pred, const std::vector<std::string>& args) {
      out += pred;
      out += '(';
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += args[i];
      }
      out += ')';
    };
    switch (l.kind) {
      case Literal::Kind::Subset: call("subset", l.args); break;
      case Literal::Kind::Exists: call("exists", l.args); break;
      case Literal::Kind::And: call("and", l.args); break;
      case Literal::Kind::Or: call("or", l.args); break;
      case Literal::Kind::Not: call("not", l.args); break;
      case Literal::Kind::Top: out += "top"; break;
      case Literal::Kind::Concept: out += l.name; break;
      case Literal::Kind::Role: call("rel", {l.name}); break;
      case Literal::Kind::RoleInv: call("rinv", {l.name}); break;
    }
  }
  return out;
}

FlatSemantics parse_flat(std::string_view text) {
  FlatSemantics flat;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) break;
    std::string_view item = text.substr(start, i - start);

    auto colon = item.find(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw Error(ErrorKind::UnknownLiteral, "literal '" + std::string(item) + "' has no label");
    }
    Literal l;
    l.label = std::string(item.substr(0, colon));
    std::string_view body = item.substr(colon + 1);
    auto open = body.find('(');
    if (open == std::string_view::npos) {
      if (body.empty()) throw Error(ErrorKind::UnknownLiteral, "empty literal '" + l.label + "'");
      l.kind = body == "top" ? Literal::Kind::Top : Literal::Kind::Concept;
      if (l.kind == Literal::Kind::Concept) l.name = std::string(body);
      flat.literals.push_back(std::move(l));
      continue;
    }
    if (body.back() != ')') throw Error(ErrorKind::UnknownLiteral, "unterminated literal '" + std::string(item) + "'");
    std::string pred(body.substr(0, open));
    std::string_view inside = body.substr(open + 1, body.size() - open - 2);
    std::vector<std::string> args;
    while (!inside.empty()) {
      auto comma = inside.find(',');
      args.emplace_back(inside.substr(0, comma));
      inside = comma == std::string_view::npos ? std::string_view{} : inside.substr(comma + 1);
    }
    static const std::map<std::string, std::pair<Literal::Kind, std::size_t>, std::less<>> kPreds = {
        {"subset", {Literal::Kind::Subset, 2}}, {"exists", {Literal::Kind::Exists, 2}},
        {"and", {Literal::Kind::And, 2}},       {"or", {Literal::Kind::Or, 2}},
        {"not", {Literal::Kind::Not, 1}},       {"rel", {Literal::Kind::Role, 1}},
        {"rinv", {Literal::Kind::RoleInv, 1}},
    };
    auto it = kPreds.find(pred);
    if (it == kPreds.end()) throw Error(ErrorKind::UnknownLiteral, "unknown predicate '" + pred + "'");
    if (args.size() != it->second.second) {
      throw Error(ErrorKind::UnknownLiteral, "predicate '" + pred + "' takes " + std::to_string(it->second.second) +
                                                 " argument(s)");
    }
    l.kind = it->second.first;
    if (l.kind == Literal::Kind::Role || l.kind == Literal::Kind::RoleInv) {
      l.name = args[0];
    } else {
      l.args = std::move(args);
    }
    flat.literals.push_back(std::move(l));
  }
  return flat;
}

ParseOutcome parse_sentence(const std::vector<Chunk>& chunks) {
  std::size_t subject = chunks.size();
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    bool after_preposition = i > 0 && chunks[i - 1].kind == ChunkKind::Preposition;
    if (chunks[i].kind == ChunkKind::Nominal && !after_preposition) {
      subject = i;
      break;
    }
  }
  if (subject == chunks.size()) return Failure{"no subject"};
  std::size_t verbal = chunks.size();
  std::size_t negation = chunks.size();
  for (std::size_t i = subject + 1; i < chunks.size(); ++i) {
    if (chunks[i].kind == ChunkKind::Negation && negation == chunks.size()) negation = i;
    if (chunks[i].kind == ChunkKind::Verbal) {
      verbal = i;
      break;
    }
  }
  if (verbal == chunks.size()) return Failure{"no verbal anchor"};
  if (negation > verbal) negation = chunks.size();

  std::vector<bool> used(chunks.size(), false);
  used[subject] = used[verbal] = true;
  if (negation != chunks.size()) used[negation] = true;
  std::size_t location = chunks.size();
  if (verbal + 2 < chunks.size() && chunks[verbal + 1].kind == ChunkKind::Preposition &&
      chunks[verbal + 2].kind == ChunkKind::Nominal) {
    location = verbal + 2;
    used[verbal + 1] = used[location] = true;
  }

  const VerbalEntry& v = *chunks[verbal].verbal;
  FlatSemantics flat;
  int next = 0;
  auto fresh = [&] { return "l" + std::to_string(next++); };
  std::string root = fresh();
  std::string subj = fresh();
  std::string pred = fresh();
  flat.literals.push_back(lit(root, Literal::Kind::Subset, {}, {subj, pred}));
  flat.literals.push_back(lit(subj, Literal::Kind::Concept, chunks[subject].value));
  if (negation != chunks.size()) {
    std::string inner = fresh();
    flat.literals.push_back(lit(pred, Literal::Kind::Not, {}, {inner}));
    pred = inner;
  }
  std::string role = fresh();
  std::string filler = fresh();
  flat.literals.push_back(lit(pred, Literal::Kind::Exists, {}, {role, filler}));
  flat.literals.push_back(lit(role, v.inverse ? Literal::Kind::RoleInv : Literal::Kind::Role, v.role));
  if (location != chunks.size()) {
    flat.literals.push_back(lit(filler, Literal::Kind::Concept, chunks[location].value));
  } else {
    flat.literals.push_back(lit(filler, Literal::Kind::Top));
  }

  std::vector<Span> skipped;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (used[i]) continue;
    if (!skipped.empty() && skipped.back().first_word + skipped.back().word_count == chunks[i].first_word) {
      skipped.back().word_count += chunks[i].word_count;
    } else {
      skipped.push_back({chunks[i].first_word, chunks[i].word_count});
    }
  }
  if (skipped.empty()) return Full{std::move(flat)};
  return Partial{std::move(flat), std::move(skipped)};
}

ParseOutcome parse_sentence(std::string_view sentence, const Lexicon& lexicon) {
  return parse_sentence(chunk_and_lex(sentence, lexicon));
}

dl::SidpAxiom flat_to_dl(const FlatSemantics& flat, std::string source) {
  std::map<std::string, const Literal*, std::less<>> by_label;
  const Literal* root = nullptr;
  for (const auto& l : flat.literals) {
    std::size_t arity = 0;
    switch (l.kind) {
      case Literal::Kind::Subset:
      case Literal::Kind::Exists:
      case Literal::Kind::And:
      case Literal::Kind::Or: arity = 2; break;
      case Literal::Kind::Not: arity = 1; break;
      default: break;
    }
    if (l.args.size() != arity) throw Error(ErrorKind::UnknownLiteral, "literal '" + l.label + "' has wrong arity");
    if (!by_label.emplace(l.label, &l).second) {
      throw Error(ErrorKind::UnknownLiteral, "label '" + l.label + "' defined twice");
    }
    if (l.kind == Literal::Kind::Subset) {
      if (root) throw Error(ErrorKind::UnknownLiteral, "more than one subset literal");
      root = &l;
    }
  }
  if (!root) throw Error(ErrorKind::UnknownLiteral, "no subset literal");

  auto find = [&](const std::string& label) -> const Literal& {
    auto it = by_label.find(label);
    if (it == by_label.end()) throw Error(ErrorKind::UnknownLiteral, "dangling label '" + label + "'");
    return *it->second;
  };
  std::set<std::string, std::less<>> on_path;
  std::function<dl::ConceptPtr(const std::string&)> tau = [&](const std::string& label) -> dl::ConceptPtr {
    const Literal& l = find(label);
    if (!on_path.insert(label).second) throw Error(ErrorKind::UnknownLiteral, "cyclic label '" + label + "'");
    dl::ConceptPtr out;
    switch (l.kind) {
      case Literal::Kind::Concept: out = dl::atomic(l.name); break;
      case Literal::Kind::Top: out = dl::top(); break;
      case Literal::Kind::And: out = dl::conj({tau(l.args[0]), tau(l.args[1])}); break;
      case Literal::Kind::Or: out = dl::disj({tau(l.args[0]), tau(l.args[1])}); break;
      case Literal::Kind::Not: out = dl::negate(tau(l.args[0])); break;
      case Literal::Kind::Exists: {
        const Literal& r = find(l.args[0]);
        if (r.kind != Literal::Kind::Role && r.kind != Literal::Kind::RoleInv) {
          throw Error(ErrorKind::UnknownLiteral, "label '" + r.label + "' is not a role");
        }
        out = dl::exists(dl::Role{r.name, r.kind == Literal::Kind::RoleInv}, tau(l.args[1]));
        break;
      }
      case Literal::Kind::Role:
      case Literal::Kind::RoleInv:
        throw Error(ErrorKind::UnknownLiteral, "role label '" + label + "' used as a concept");
      case Literal::Kind::Subset: throw Error(ErrorKind::UnknownLiteral, "nested subset literal '" + label + "'");
    }
    on_path.erase(label);
    return out;
  };
  return dl::SidpAxiom{std::move(source), tau(root->args[0]), tau(root->args[1])};
}

}  // namespace tracer::nl
