#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "tracer/error.hpp"
#include "tracer/pipeline.hpp"

namespace tracer::pipeline {

namespace {

bool is_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view file_text) {
  std::vector<Sentence> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= file_text.size()) {
    std::size_t end = file_text.find('\n', pos);
    if (end == std::string_view::npos) end = file_text.size();
    ++line_no;
    std::string_view line = file_text.substr(pos, end - pos);
    std::size_t b = 0;
    while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    std::size_t e = line.size();
    while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
    if (e > b && line[b] != '#') {
      Sentence s;
      s.line = line_no;
      std::size_t k = b;
      while (k < e && is_label_char(line[k])) ++k;
      if (k > b && k < e && line[k] == ':') {
        s.id = std::string(line.substr(b, k - b));
        b = k + 1;
        while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
      } else {
        s.id = "s" + std::to_string(line_no);
      }
      s.text = std::string(line.substr(b, e - b));
      s.offset = static_cast<std::int64_t>(pos + b);
      out.push_back(std::move(s));
    }
    if (end == file_text.size()) break;
    pos = end + 1;
  }
  return out;
}

std::vector<dl::DetectedTrace> reduce(const std::vector<dl::DetectedTrace>& detected) {
  using dl::TraceKind;
  std::set<std::pair<std::string, std::string>> entails;
  std::set<std::pair<std::string, std::string>> conflicts;
  std::set<std::string> nodes;
  for (const auto& t : detected) {
    nodes.insert(t.from);
    nodes.insert(t.to);
    if (t.kind == TraceKind::Conflicts) {
      conflicts.emplace(t.from, t.to);
      conflicts.emplace(t.to, t.from);
    } else {
      entails.emplace(t.from, t.to);
      if (t.kind == TraceKind::Equals) entails.emplace(t.to, t.from);
    }
  }
  auto entail = [&](const std::string& a, const std::string& b) { return entails.count({a, b}) > 0; };
  auto equivalent = [&](const std::string& a, const std::string& b) { return a == b || (entail(a, b) && entail(b, a)); };

  std::vector<dl::DetectedTrace> out;
  for (const auto& t : detected) {
    bool implied = false;
    if (t.kind == TraceKind::Refines || t.kind == TraceKind::Requires) {
      for (const auto& c : nodes) {
        if (equivalent(c, t.from) || equivalent(c, t.to)) continue;
        if (entail(t.from, c) && entail(c, t.to)) {
          implied = true;
          break;
        }
      }
    } else if (t.kind == TraceKind::Conflicts) {
      for (const auto& c : nodes) {
        if (c == t.from || c == t.to) continue;
        if ((entail(t.from, c) && conflicts.count({c, t.to})) || (entail(t.to, c) && conflicts.count({t.from, c}))) {
          implied = true;
          break;
        }
      }
    }
    // conflicts is symmetric; one direction per pair survives.
    if (t.kind == TraceKind::Conflicts && t.to < t.from &&
        std::any_of(detected.begin(), detected.end(), [&](const dl::DetectedTrace& u) {
          return u.kind == TraceKind::Conflicts && u.from == t.to && u.to == t.from;
        })) {
      implied = true;
    }
    if (!implied) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DlResult dl_pipeline(std::string_view sentences_text, const nl::Lexicon& lexicon, const dl::Ontology& ontology,
                     const dl::ReasonerLimits& limits) {
  DlResult result;
  std::vector<dl::SidpAxiom> axioms;
  for (auto& s : split_sentences(sentences_text)) {
    SentenceResult r;
    auto chunks = nl::chunk_and_lex(s.text, lexicon);
    for (const auto& c : chunks) r.chunks += c.label();
    nl::ParseOutcome outcome = nl::parse_sentence(chunks);
    const nl::FlatSemantics* flat = nullptr;
    if (auto* full = std::get_if<nl::Full>(&outcome)) {
      r.status = "full";
      flat = &full->flat;
    } else if (auto* partial = std::get_if<nl::Partial>(&outcome)) {
      r.status = "partial";
      r.skipped = partial->skipped;
      flat = &partial->flat;
    } else {
      r.status = "failure";
      r.reason = std::get<nl::Failure>(outcome).reason;
    }
    if (flat) {
      r.flat = nl::to_string(*flat);
      try {
        r.axiom = nl::flat_to_dl(*flat, s.id);
        axioms.push_back(*r.axiom);
      } catch (const Error& e) {
        r.status = "failure";
        r.reason = e.what();
      }
    }
    r.sentence = std::move(s);
    result.sentences.push_back(std::move(r));
  }

  dl::Reasoner with_roles(ontology, limits);
  dl::Reasoner without_roles(ontology.without_role_inclusions(), limits);
  for (std::size_t i = 0; i < axioms.size(); ++i) {
    for (std::size_t j = i + 1; j < axioms.size(); ++j) {
      for (auto& t : dl::detect_trace(axioms[i], axioms[j], with_roles, without_roles)) {
        result.detected.push_back(std::move(t));
      }
    }
  }
  result.traces = reduce(result.detected);
  return result;
}

trace::TraceabilityInformation to_workspace(const DlResult& result, const std::string& sentences_path,
                                            const std::string& sig) {
  trace::TraceabilityInformation info;
  for (const auto& s : result.sentences) {
    if (!s.axiom) continue;
    if (info.locations.count(s.sentence.id)) {
      throw Error(ErrorKind::InvalidWorkspace, "duplicate sentence id '" + s.sentence.id + "'");
    }
    trace::TraceLocation loc;
    loc.id = s.sentence.id;
    loc.kind = trace::TextSpan{sentences_path, s.sentence.offset, static_cast<std::int64_t>(s.sentence.text.size())};
    info.locations.emplace(loc.id, loc);
    info.types.emplace(loc.id, sig);
  }
  auto link = [&](std::string relation, const std::string& a, const std::string& b) {
    trace::TraceLink l;
    l.id = relation + "-" + a + "-" + b;
    l.endpoints = {a, b};
    l.relation = std::move(relation);
    l.provenance = trace::Provenance::DL;
    info.links.emplace(l.id, std::move(l));
  };
  for (const auto& t : result.traces) {
    std::string relation(dl::to_string(t.kind));
    link(relation, t.from, t.to);
    if (t.kind == dl::TraceKind::Conflicts || t.kind == dl::TraceKind::Equals) link(relation, t.to, t.from);
  }
  trace::validate(info);
  return info;
}

}  // namespace tracer::pipeline
