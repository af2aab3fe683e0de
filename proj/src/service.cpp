#include <fstream>
#include <sstream>

#include <httplib.h>

#include "tracer/report.hpp"
#include "tracer/service.hpp"

namespace tracer::service {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Internal, "cannot write '" + p.string() + "'");
  out << text;
}

Response error_response(const Error& e) { return {http_status(e.kind()), report::error_json(e)}; }

Response bad_request(const std::string& message) {
  return error_response(Error(ErrorKind::InvalidArgument, message));
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::MalformedDocument, "request body is not valid JSON");
  }
  if (!j.is_object()) throw Error(ErrorKind::MalformedDocument, "request body must be a JSON object");
  return j;
}

std::int64_t required_revision(const json& body) {
  auto it = body.find("revision");
  if (it == body.end() || !it->is_number_integer()) {
    throw Error(ErrorKind::InvalidArgument, "mutating requests must carry an integer 'revision'");
  }
  return it->get<std::int64_t>();
}

std::vector<std::string> string_list(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_array()) throw Error(ErrorKind::InvalidArgument, std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorKind::InvalidArgument, std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string string_value(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw Error(ErrorKind::InvalidArgument, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

void stale(std::int64_t expected, std::int64_t current) {
  throw Error(ErrorKind::StaleRevision, "request was computed against revision " + std::to_string(expected) +
                                            " but the workspace is at revision " + std::to_string(current));
}

}  // namespace

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::StaleRevision: return 409;
    case ErrorKind::TypeViolation:
    case ErrorKind::UntypedEndpoint:
    case ErrorKind::ArityMismatch:
    case ErrorKind::AbstractSignature:
    case ErrorKind::AmbiguousSignature:
    case ErrorKind::TupleOutsideType:
    case ErrorKind::InconsistentPremises:
    case ErrorKind::NoSuggestion:
    case ErrorKind::NonHornFact: return 422;
    case ErrorKind::ResourceLimit:
    case ErrorKind::Internal: return 500;
    case ErrorKind::UnknownLocation: return 404;
    default: return 400;
  }
}

Service::Service(std::string spec_text, trace::TraceabilityInformation info, ServiceOptions options)
    : options_(std::move(options)),
      spec_text_(std::move(spec_text)),
      spec_(std::make_shared<const forl::TypedSpec>(forl::load_spec(spec_text_))),
      info_(std::move(info)) {
  trace::to_relational(info_, *spec_);
}

Service::~Service() = default;

std::unique_ptr<Service> Service::from_files(const std::filesystem::path& spec, const std::filesystem::path& workspace,
                                             bool save) {
  ServiceOptions opts;
  opts.spec_path = spec;
  opts.workspace_path = workspace;
  opts.save = save;
  return std::make_unique<Service>(read_file(spec), trace::load(read_file(workspace)), std::move(opts));
}

std::int64_t Service::revision() const {
  std::shared_lock lock(state_mutex_);
  return info_.revision;
}

trace::TraceabilityInformation Service::workspace() const {
  std::shared_lock lock(state_mutex_);
  return info_;
}

Service::Snapshot Service::snapshot() const {
  std::shared_lock lock(state_mutex_);
  return {spec_, info_};
}

void Service::persist_locked() {
  if (!options_.save) return;
  if (!options_.workspace_path.empty()) write_file(options_.workspace_path, trace::save(info_));
  if (!options_.spec_path.empty()) write_file(options_.spec_path, spec_text_);
}

void Service::commit(std::int64_t revision, trace::TraceabilityInformation next) {
  {
    std::unique_lock lock(state_mutex_);
    if (info_.revision != revision) stale(revision, info_.revision);
    info_ = std::move(next);
    std::erase_if(pending_, [&](const analysis::InferredTuple& t) { return info_.find_link(t.relation, t.tuple).has_value(); });
    persist_locked();
  }
  std::lock_guard lock(tokens_mutex_);
  tokens_.clear();
}

Response Service::handle(const std::string& method, const std::string& target, const std::string& body) {
  try {
    std::string path = target;
    std::string query;
    if (auto q = target.find('?'); q != std::string::npos) {
      path = target.substr(0, q);
      query = target.substr(q + 1);
    }
    const std::string solutions_prefix = "/api/solutions/";
    const std::string traces_prefix = "/api/traces/";
    if (method == "GET" && path == "/api/workspace") return get_workspace();
    if (method == "GET" && path == "/api/graph") return get_graph();
    if (method == "GET" && path.starts_with(solutions_prefix)) {
      std::string rest = path.substr(solutions_prefix.size());
      auto slash = rest.find('/');
      if (slash != std::string::npos) {
        std::string token = rest.substr(0, slash);
        std::string dir = rest.substr(slash + 1);
        if (dir == "next" || dir == "prev") return solutions(token, dir == "next");
      }
    }
    if (method == "POST") {
      json j = parse_body(body);
      if (path == "/api/analysis/consistency") return analysis("consistency", j);
      if (path == "/api/analysis/infer") return analysis("infer", j);
      if (path == "/api/analysis/discover") return analysis("discover", j);
      if (path == "/api/traces") return create_trace(j);
      if (path == "/api/traces/accept") return accept(j);
      if (path == "/api/spec") return replace_spec(j);
    }
    if (method == "DELETE" && path.starts_with(traces_prefix)) {
      std::string id = path.substr(traces_prefix.size());
      std::optional<std::int64_t> rev;
      for (std::size_t pos = 0; pos < query.size();) {
        auto amp = query.find('&', pos);
        std::string kv = query.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
        if (kv.starts_with("revision=")) {
          try {
            rev = std::stoll(kv.substr(9));
          } catch (const std::exception&) {
            return bad_request("revision must be an integer");
          }
        }
        if (amp == std::string::npos) break;
        pos = amp + 1;
      }
      if (!rev) rev = required_revision(parse_body(body));
      return delete_trace(id, *rev);
    }
    return {404, json{{"schema", report::kSchema}, {"error", "NotFound"}, {"message", method + " " + path}}};
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response(Error(ErrorKind::Internal, e.what()));
  }
}

Response Service::get_workspace() {
  Snapshot s = snapshot();
  std::string text;
  {
    std::shared_lock lock(state_mutex_);
    text = spec_text_;
  }
  json sigs = json::array();
  for (const auto& sig : s.spec->sigs) {
    sigs.push_back(json{{"name", sig.name}, {"abstract", sig.is_abstract}, {"parents", sig.parents}});
  }
  json fields = json::array();
  for (const auto& r : s.spec->relations) {
    if (!r.is_sig) fields.push_back(json{{"name", r.name}, {"columns", r.columns}});
  }
  return {200, json{{"schema", report::kSchema},
                    {"revision", s.info.revision},
                    {"workspace", json::parse(trace::save(s.info))},
                    {"spec", json{{"text", text}, {"sigs", sigs}, {"fields", fields}}}}};
}

Response Service::get_graph() {
  std::shared_lock lock(state_mutex_);
  return {200, report::graph_json(info_, pending_)};
}

Response Service::analysis(const std::string& kind, const json& body) {
  Snapshot s = snapshot();
  if (auto it = body.find("revision"); it != body.end()) {
    if (!it->is_number_integer()) throw Error(ErrorKind::InvalidArgument, "'revision' must be an integer");
    if (it->get<std::int64_t>() != s.info.revision) stale(it->get<std::int64_t>(), s.info.revision);
  }
  rel::Instance instance = trace::to_relational(s.info, *s.spec);
  analysis::AnalysisReport r;
  if (kind == "consistency") {
    r = analysis::check_consistency(*s.spec, instance, options_.infer.solver);
  } else if (kind == "infer") {
    analysis::InferOptions opts = options_.infer;
    if (auto it = body.find("engine"); it != body.end()) {
      std::string e = it->is_string() ? it->get<std::string>() : "";
      if (e == "horn") {
        opts.engine = analysis::Engine::Horn;
      } else if (e == "sat") {
        opts.engine = analysis::Engine::Sat;
      } else {
        throw Error(ErrorKind::InvalidArgument, "engine must be 'sat' or 'horn'");
      }
    }
    r = analysis::infer_relations(*s.spec, instance, string_list(body, "targets"), opts);
  } else {
    int fresh = 1;
    if (auto it = body.find("fresh"); it != body.end()) {
      if (!it->is_number_integer()) throw Error(ErrorKind::InvalidArgument, "'fresh' must be an integer");
      fresh = it->get<int>();
    }
    bool link_fresh = body.value("linkFresh", false);
    r = analysis::discover_locations(*s.spec, instance, fresh, link_fresh, options_.infer.solver);
  }

  json out = report::analysis_json(r, false);
  out["revision"] = s.info.revision;
  if (kind == "infer") {
    std::unique_lock lock(state_mutex_);
    if (info_.revision == s.info.revision) pending_ = r.inferred;
  }
  if (r.solutions) {
    std::lock_guard lock(tokens_mutex_);
    std::string token = "s" + std::to_string(next_token_++);
    Cursor c;
    c.iterator = r.solutions;
    c.seen.push_back({r.inferred, r.suggestions});
    c.revision = s.info.revision;
    tokens_.emplace(token, std::move(c));
    out["token"] = token;
  }
  return {200, out};
}

Response Service::solutions(const std::string& token, bool forward) {
  std::int64_t current = revision();
  std::lock_guard lock(tokens_mutex_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) {
    return {404, json{{"schema", report::kSchema}, {"error", "UnknownToken"}, {"message", "unknown or invalidated token '" + token + "'"}}};
  }
  Cursor& c = it->second;
  if (c.revision != current) stale(c.revision, current);
  json out{{"schema", report::kSchema}, {"token", token}};
  if (forward) {
    if (c.index + 1 >= c.seen.size() && !c.exhausted) {
      if (auto next = c.iterator->next()) {
        c.seen.push_back(std::move(*next));
      } else {
        c.exhausted = true;
      }
    }
    if (c.index + 1 < c.seen.size()) {
      ++c.index;
    } else {
      out["exhausted"] = true;
      out["index"] = c.index;
      return {200, out};
    }
  } else if (c.index == 0) {
    out["exhausted"] = true;
    out["index"] = 0;
    return {200, out};
  } else {
    --c.index;
  }
  out["exhausted"] = false;
  out["index"] = c.index;
  out["solution"] = report::solution_json(c.seen[c.index]);
  return {200, out};
}

Response Service::create_trace(const json& body) {
  std::int64_t rev = required_revision(body);
  Snapshot s = snapshot();
  if (rev != s.info.revision) stale(rev, s.info.revision);
  std::vector<std::string> endpoints = string_list(body, "endpoints");
  trace::TraceabilityInformation next;
  std::string id;
  bool duplicate = false;
  if (body.contains("relation")) {
    auto r = analysis::accept_trace(s.info, *s.spec, string_value(body, "relation"), endpoints,
                                    trace::Provenance::Manual);
    next = std::move(r.info);
    id = r.link_id;
    duplicate = r.duplicate;
  } else {
    trace::TraceLink link;
    link.endpoints = endpoints;
    link.provenance = trace::Provenance::Manual;
    if (body.contains("id")) {
      link.id = string_value(body, "id");
    } else {
      link.id = "link";
      for (const auto& e : endpoints) link.id += "-" + e;
    }
    id = link.id;
    next = trace::add_link(s.info, std::move(link));
  }
  if (!duplicate) commit(rev, next);
  return {duplicate ? 200 : 201,
          json{{"schema", report::kSchema}, {"id", id}, {"duplicate", duplicate}, {"revision", revision()}}};
}

Response Service::accept(const json& body) {
  std::int64_t rev = required_revision(body);
  Snapshot s = snapshot();
  if (rev != s.info.revision) stale(rev, s.info.revision);
  auto r = analysis::accept_trace(s.info, *s.spec, string_value(body, "relation"), string_list(body, "tuple"));
  if (!r.duplicate) commit(rev, r.info);
  return {200, json{{"schema", report::kSchema}, {"id", r.link_id}, {"duplicate", r.duplicate}, {"revision", revision()}}};
}

Response Service::delete_trace(const std::string& id, std::int64_t rev) {
  Snapshot s = snapshot();
  if (rev != s.info.revision) stale(rev, s.info.revision);
  if (!s.info.links.count(id)) {
    return {404, json{{"schema", report::kSchema}, {"error", "UnknownLink"}, {"message", "no trace link '" + id + "'"}}};
  }
  commit(rev, trace::remove_link(s.info, id));
  return {200, json{{"schema", report::kSchema}, {"id", id}, {"revision", revision()}}};
}

Response Service::replace_spec(const json& body) {
  std::int64_t rev = required_revision(body);
  std::string text = string_value(body, "text");
  auto spec = std::make_shared<const forl::TypedSpec>(forl::load_spec(text));
  {
    std::unique_lock lock(state_mutex_);
    if (rev != info_.revision) stale(rev, info_.revision);
    trace::to_relational(info_, *spec);
    spec_text_ = std::move(text);
    spec_ = std::move(spec);
    ++info_.revision;
    pending_.clear();
    persist_locked();
  }
  {
    std::lock_guard lock(tokens_mutex_);
    tokens_.clear();
  }
  return {200, json{{"schema", report::kSchema}, {"revision", revision()}}};
}

void Service::install(httplib::Server& server) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::string target = req.path;
    if (!req.params.empty()) {
      char sep = '?';
      for (const auto& [k, v] : req.params) {
        target += sep + k + "=" + v;
        sep = '&';
      }
    }
    Response r = handle(req.method, target, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/api/.*)", route);
  server.Post(R"(/api/.*)", route);
  server.Delete(R"(/api/.*)", route);
}

}  // namespace tracer::service
