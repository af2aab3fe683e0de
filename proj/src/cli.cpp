#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "tracer/cli.hpp"
#include "tracer/grounder.hpp"
#include "tracer/report.hpp"
#include "tracer/service.hpp"

namespace tracer::cli {

namespace {

namespace fs = std::filesystem;
using report::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

struct Inputs {
  std::string spec_path, workspace_path;
  bool json = false;
  bool timing = false;

  void add(CLI::App* cmd) {
    cmd->add_option("spec,--spec", spec_path, "FORL specification")->required();
    cmd->add_option("workspace,--workspace", workspace_path, "Traceability workspace (JSON)")->required();
    cmd->add_flag("--json", json, "Machine-readable output");
    cmd->add_flag("--timing", timing, "Include wall-clock time in the statistics");
  }
};

// Prints parse and type diagnostics in `path:line:col: severity: message` form.
forl::TypedSpec load_spec_file(const std::string& path, std::ostream& err) {
  std::string text = read_file(path);
  try {
    forl::TypedSpec spec = forl::load_spec(text);
    for (const auto& w : spec.warnings) err << w.format(path) << "\n";
    return spec;
  } catch (const SyntaxError& e) {
    err << e.diagnostic().format(path) << "\n";
    throw;
  } catch (const TypeError& e) {
    for (const auto& d : e.diagnostics()) err << d.format(path) << "\n";
    throw;
  }
}

std::string tuple_text(const analysis::InferredTuple& t) {
  std::string s = t.relation + "(";
  for (std::size_t i = 0; i < t.tuple.size(); ++i) s += (i ? "," : "") + t.tuple[i];
  return s + ")";
}

void print_solution(std::ostream& out, const analysis::Solution& s) {
  for (const auto& t : s.inferred) out << "  " << tuple_text(t) << " [" << t.provenance << "]\n";
  for (const auto& sg : s.suggestions) {
    out << "  " << sg.atom << ":";
    for (const auto& sig : sg.sigs) out << " " << sig;
    out << "\n";
    for (const auto& t : sg.links) out << "    " << tuple_text(t) << "\n";
  }
}

void print_stats(std::ostream& out, const analysis::Stats& s) {
  out << "  vars=" << s.vars << " clauses=" << s.clauses << " refinements=" << s.refinements << " ms=" << s.ms << "\n";
}

// Emits the report and up to limit-1 alternative solutions.
int emit_analysis(std::ostream& out, const Inputs& in, analysis::AnalysisReport& r, int limit) {
  std::vector<analysis::Solution> more;
  if (r.solutions) {
    for (int i = 1; i < limit; ++i) {
      auto s = r.solutions->next();
      if (!s) break;
      more.push_back(std::move(*s));
    }
  }
  if (in.json) {
    json j = report::analysis_json(r, in.timing);
    if (limit > 1) {
      json alts = json::array();
      for (const auto& s : more) alts.push_back(report::solution_json(s));
      j["alternatives"] = alts;
    }
    out << report::dump(j);
  } else {
    out << analysis::to_string(r.verdict) << "\n";
    for (const auto& v : r.violated) out << "  violated: " << v << "\n";
    print_solution(out, {r.inferred, r.suggestions});
    for (std::size_t i = 0; i < more.size(); ++i) {
      out << "solution " << i + 2 << "\n";
      print_solution(out, more[i]);
    }
    if (in.timing) print_stats(out, r.stats);
  }
  return r.verdict == analysis::Verdict::Inconsistent ? 1 : 0;
}

int serve(const std::string& spec, const std::string& workspace, const std::string& host, int port, bool save,
          std::ostream& out) {
  auto svc = service::Service::from_files(spec, workspace, save);
  httplib::Server server;
  svc->install(server);
  if (!server.bind_to_port(host, port)) throw Error(ErrorKind::Internal, "cannot bind " + host + ":" + std::to_string(port));
  out << "listening on http://" << host << ":" << port << "\n" << std::flush;
  server.listen_after_bind();
  return 0;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InconsistentPremises:
    case ErrorKind::NoSuggestion: return 1;
    case ErrorKind::ResourceLimit:
    case ErrorKind::Internal: return 3;
    default: return 2;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traceability analyses over FORL specifications"};
  app.require_subcommand(1);

  Inputs check_in, infer_in, discover_in, dimacs_in;
  auto* check = app.add_subcommand("check", "Check workspace consistency");
  check_in.add(check);

  auto* infer = app.add_subcommand("infer", "Infer trace links");
  infer_in.add(infer);
  std::vector<std::string> targets;
  std::string engine = "sat";
  std::string grounding = "lazy";
  int limit = 1;
  infer->add_option("--target", targets, "Relation to infer (repeatable)")->required()->allow_extra_args(false);
  infer->add_option("--engine", engine, "sat or horn")->check(CLI::IsMember({"sat", "horn"}));
  infer->add_option("--grounding", grounding, "lazy or eager")->check(CLI::IsMember({"lazy", "eager"}));
  infer->add_option("--limit", limit, "Solutions to print")->check(CLI::PositiveNumber);

  auto* discover = app.add_subcommand("discover", "Suggest missing trace locations");
  discover_in.add(discover);
  int fresh = 1;
  bool link_fresh = false;
  int discover_limit = 1;
  discover->add_option("--fresh", fresh, "Number of fresh atoms");
  discover->add_flag("--link-fresh", link_fresh, "Allow links between fresh atoms");
  discover->add_option("--limit", discover_limit, "Solutions to print")->check(CLI::PositiveNumber);

  auto* parse = app.add_subcommand("parse", "Parse and type-check a specification");
  std::string parse_path;
  bool parse_json = false;
  parse->add_option("spec", parse_path, "FORL specification")->required();
  parse->add_flag("--json", parse_json, "Machine-readable output");

  auto* dl = app.add_subcommand("dl-trace", "Detect traces between controlled-language sentences");
  std::string sentences_path, lexicon_path, ontology_path, emit_path;
  bool dl_json = false;
  dl->add_option("sentences", sentences_path, "Sentence file, one per line")->required();
  dl->add_option("--lexicon", lexicon_path, "Lexicon (JSON)")->required();
  dl->add_option("--ontology", ontology_path, "Ontology file")->required();
  dl->add_option("--emit-workspace", emit_path, "Write the detected traces as a workspace");
  dl->add_flag("--json", dl_json, "Machine-readable output");

  auto* srv = app.add_subcommand("serve", "Serve the workbench HTTP API");
  std::string srv_spec, srv_workspace, host = "127.0.0.1";
  int port = 8080;
  bool no_save = false;
  srv->add_option("--spec", srv_spec, "FORL specification")->required();
  srv->add_option("--workspace", srv_workspace, "Traceability workspace (JSON)")->required();
  srv->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  srv->add_option("--host", host, "Bind address");
  srv->add_flag("--no-save", no_save, "Keep mutations in memory only");

  auto* dimacs = app.add_subcommand("export-dimacs", "Write the grounded problem as DIMACS CNF");
  dimacs_in.add(dimacs);
  std::vector<std::string> dimacs_targets;
  std::string dimacs_out;
  dimacs->add_option("--target", dimacs_targets, "Relation to infer (repeatable); consistency when absent")
      ->allow_extra_args(false);
  dimacs->add_option("-o,--output", dimacs_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    auto load = [&](const Inputs& in) {
      forl::TypedSpec spec = load_spec_file(in.spec_path, err);
      trace::TraceabilityInformation info = trace::load(read_file(in.workspace_path));
      rel::Instance instance = trace::to_relational(info, spec);
      return std::make_pair(std::move(spec), std::move(instance));
    };

    if (*check) {
      auto [spec, instance] = load(check_in);
      auto r = analysis::check_consistency(spec, instance);
      return emit_analysis(out, check_in, r, 1);
    }
    if (*infer) {
      auto [spec, instance] = load(infer_in);
      analysis::InferOptions opts;
      opts.engine = engine == "horn" ? analysis::Engine::Horn : analysis::Engine::Sat;
      opts.grounding = grounding == "eager" ? analysis::Grounding::Eager : analysis::Grounding::Lazy;
      auto r = analysis::infer_relations(spec, instance, targets, opts);
      return emit_analysis(out, infer_in, r, limit);
    }
    if (*discover) {
      auto [spec, instance] = load(discover_in);
      auto r = analysis::discover_locations(spec, instance, fresh, link_fresh);
      return emit_analysis(out, discover_in, r, discover_limit);
    }
    if (*parse) {
      forl::TypedSpec spec = load_spec_file(parse_path, err);
      if (!parse_json) {
        out << forl::pretty_print(spec.ast);
        return 0;
      }
      json sigs = json::array();
      for (const auto& s : spec.sigs) sigs.push_back(json{{"name", s.name}, {"abstract", s.is_abstract}, {"parents", s.parents}});
      json fields = json::array();
      for (const auto& r : spec.relations) {
        if (!r.is_sig) fields.push_back(json{{"name", r.name}, {"columns", r.columns}});
      }
      json facts = json::array();
      for (const auto& f : spec.facts) {
        static constexpr const char* kHorn[] = {"definite", "denial", "not-horn"};
        json jf{{"name", f.name}, {"implicit", f.implicit}, {"horn", kHorn[static_cast<int>(f.horn)]},
                {"formula", forl::print_formula(*f.formula)}};
        if (f.reason) jf["reason"] = *f.reason;
        facts.push_back(std::move(jf));
      }
      out << report::dump(json{{"schema", report::kSchema}, {"sigs", sigs}, {"fields", fields}, {"facts", facts}});
      return 0;
    }
    if (*dl) {
      auto lexicon = nl::parse_lexicon(read_file(lexicon_path));
      auto ontology = dl::parse_ontology(read_file(ontology_path));
      auto result = pipeline::dl_pipeline(read_file(sentences_path), lexicon, ontology);
      if (!emit_path.empty()) {
        // Text spans are resolved relative to the emitted workspace.
        fs::path rel = fs::relative(fs::absolute(sentences_path), fs::absolute(emit_path).parent_path());
        write_file(emit_path, trace::save(pipeline::to_workspace(result, rel.generic_string())));
      }
      if (dl_json) {
        out << report::dump(report::dl_json(result));
      } else {
        for (const auto& s : result.sentences) {
          out << s.sentence.id << ": " << s.status;
          if (s.axiom) out << "  " << dl::to_string(s.axiom->sub) << " SubClassOf " << dl::to_string(s.axiom->sup);
          if (!s.reason.empty()) out << "  (" << s.reason << ")";
          out << "\n";
        }
        for (const auto& t : result.traces) out << dl::to_string(t.kind) << "(" << t.from << "," << t.to << ")\n";
      }
      for (const auto& s : result.sentences) {
        if (s.status == "failure") err << sentences_path << ":" << s.sentence.line << ": " << s.reason << "\n";
      }
      return 0;
    }
    if (*srv) return serve(srv_spec, srv_workspace, host, port, !no_save, out);
    if (*dimacs) {
      auto [spec, instance] = load(dimacs_in);
      bool infer_mode = !dimacs_targets.empty();
      rel::Bounds bounds = rel::build_bounds(
          infer_mode ? rel::BoundsMode::infer(dimacs_targets) : rel::BoundsMode::consistency(), spec, instance);
      auto facts = infer_mode ? analysis::inference_facts(spec, dimacs_targets) : analysis::consistency_facts(spec);
      ground::Grounding g = ground::ground(facts, bounds);
      sat::CnfFormula cnf = ground::to_cnf(g.circuit, g.root, g.vars.num_vars());
      std::string text = sat::export_dimacs(cnf);
      if (dimacs_out.empty()) {
        out << text;
      } else {
        write_file(dimacs_out, text);
      }
      return 0;
    }
  } catch (const Error& e) {
    if (check_in.json || infer_in.json || discover_in.json || dl_json || parse_json) {
      out << report::dump(report::error_json(e));
    }
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace tracer::cli
