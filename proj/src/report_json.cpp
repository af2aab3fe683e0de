#include "tracer/report.hpp"

namespace tracer::report {

json inferred_json(const analysis::InferredTuple& t) {
  return json{{"relation", t.relation}, {"tuple", t.tuple}, {"provenance", t.provenance}};
}

json solution_json(const analysis::Solution& s) {
  json inferred = json::array();
  for (const auto& t : s.inferred) inferred.push_back(inferred_json(t));
  json suggestions = json::array();
  for (const auto& sg : s.suggestions) {
    json links = json::array();
    for (const auto& t : sg.links) links.push_back(inferred_json(t));
    suggestions.push_back(json{{"atom", sg.atom}, {"sigs", sg.sigs}, {"links", links}});
  }
  return json{{"inferred", inferred}, {"suggestions", suggestions}};
}

json analysis_json(const analysis::AnalysisReport& r, bool timing) {
  json j;
  j["schema"] = kSchema;
  j["mode"] = r.mode;
  j["verdict"] = std::string(analysis::to_string(r.verdict));
  j["violated"] = r.violated;
  json sol = solution_json({r.inferred, r.suggestions});
  j["inferred"] = sol["inferred"];
  j["suggestions"] = sol["suggestions"];
  json stats{{"vars", r.stats.vars}, {"clauses", r.stats.clauses}, {"refinements", r.stats.refinements}};
  if (timing) stats["ms"] = r.stats.ms;
  j["stats"] = stats;
  return j;
}

json dl_json(const pipeline::DlResult& r) {
  json sentences = json::array();
  for (const auto& s : r.sentences) {
    json e{{"id", s.sentence.id}, {"line", s.sentence.line}, {"text", s.sentence.text}, {"status", s.status},
           {"chunks", s.chunks}};
    if (!s.flat.empty()) e["flat"] = s.flat;
    if (s.axiom) {
      e["axiom"] = json{{"sub", dl::to_string(s.axiom->sub)}, {"sup", dl::to_string(s.axiom->sup)}};
    }
    if (!s.reason.empty()) e["reason"] = s.reason;
    if (!s.skipped.empty()) {
      json spans = json::array();
      for (const auto& sp : s.skipped) spans.push_back(json{{"firstWord", sp.first_word}, {"words", sp.word_count}});
      e["skipped"] = spans;
    }
    sentences.push_back(std::move(e));
  }
  auto traces = [](const std::vector<dl::DetectedTrace>& ts) {
    json out = json::array();
    for (const auto& t : ts) {
      out.push_back(json{{"relation", std::string(dl::to_string(t.kind))}, {"from", t.from}, {"to", t.to},
                         {"provenance", "DL"}});
    }
    return out;
  };
  return json{{"schema", kSchema},
              {"mode", "dl-trace"},
              {"sentences", sentences},
              {"traces", traces(r.traces)},
              {"detected", traces(r.detected)}};
}

json error_json(const Error& e) {
  json j{{"schema", kSchema}, {"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (auto* te = dynamic_cast<const TypeError*>(&e)) {
    json diags = json::array();
    for (const auto& d : te->diagnostics()) diags.push_back(json{{"line", d.line}, {"col", d.col}, {"message", d.message}});
    j["diagnostics"] = diags;
  } else if (auto* se = dynamic_cast<const SyntaxError*>(&e)) {
    j["diagnostics"] = json::array({json{{"line", se->line()}, {"col", se->col()}, {"message", se->what()}}});
  }
  return j;
}

json graph_json(const trace::TraceabilityInformation& info, const std::vector<analysis::InferredTuple>& pending) {
  json nodes = json::array();
  for (const auto& [id, loc] : info.locations) {
    json n{{"id", id}};
    auto type = info.types.find(id);
    n["type"] = type == info.types.end() ? json(nullptr) : json(type->second);
    std::visit([&](const auto& k) { n["path"] = k.path; }, loc.kind);
    if (loc.parent) n["parent"] = *loc.parent;
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const auto& [id, link] : info.links) {
    edges.push_back(json{{"id", id},
                         {"relation", link.relation ? json(*link.relation) : json(nullptr)},
                         {"endpoints", link.endpoints},
                         {"provenance", std::string(trace::to_string(link.provenance))},
                         {"accepted", true}});
  }
  for (const auto& t : pending) {
    if (info.find_link(t.relation, t.tuple)) continue;
    std::string id = t.relation;
    for (const auto& a : t.tuple) id += "-" + a;
    edges.push_back(json{{"id", id},
                         {"relation", t.relation},
                         {"endpoints", t.tuple},
                         {"provenance", t.provenance},
                         {"accepted", false}});
  }
  return json{{"schema", kSchema}, {"revision", info.revision}, {"nodes", nodes}, {"edges", edges}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace tracer::report
