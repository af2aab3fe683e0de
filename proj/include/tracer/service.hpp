#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracer/analyses.hpp"
#include "tracer/forl.hpp"
#include "tracer/trace_model.hpp"

namespace httplib {
class Server;
}

namespace tracer::service {

using nlohmann::json;

struct ServiceOptions {
  // When set, every accepted mutation is written back to these files.
  std::filesystem::path spec_path;
  std::filesystem::path workspace_path;
  bool save = false;
  analysis::InferOptions infer;
};

struct Response {
  int status = 200;
  json body;
};

// One workspace session behind the HTTP API. Readers and analyses work on
// snapshots; mutations are serialized, must name the revision they were
// computed against, and invalidate every solution token.
class Service {
 public:
  Service(std::string spec_text, trace::TraceabilityInformation info, ServiceOptions options = {});
  ~Service();

  static std::unique_ptr<Service> from_files(const std::filesystem::path& spec, const std::filesystem::path& workspace,
                                             bool save);

  // Transport-independent dispatch; `target` may carry a query string.
  Response handle(const std::string& method, const std::string& target, const std::string& body);

  // Routes every /api request of `server` to handle().
  void install(httplib::Server& server);

  std::int64_t revision() const;
  trace::TraceabilityInformation workspace() const;

 private:
  struct Snapshot {
    std::shared_ptr<const forl::TypedSpec> spec;
    trace::TraceabilityInformation info;
  };
  struct Cursor {
    std::shared_ptr<analysis::SolutionIterator> iterator;
    std::vector<analysis::Solution> seen;
    std::size_t index = 0;
    bool exhausted = false;
    std::int64_t revision = 0;
  };

  Snapshot snapshot() const;
  Response get_workspace();
  Response get_graph();
  Response analysis(const std::string& kind, const json& body);
  Response solutions(const std::string& token, bool forward);
  Response create_trace(const json& body);
  Response accept(const json& body);
  Response delete_trace(const std::string& id, std::int64_t revision);
  Response replace_spec(const json& body);

  // Installs `next` under the writer lock when `revision` is still current.
  void commit(std::int64_t revision, trace::TraceabilityInformation next);
  void persist_locked();

  ServiceOptions options_;
  mutable std::shared_mutex state_mutex_;
  std::string spec_text_;
  std::shared_ptr<const forl::TypedSpec> spec_;
  trace::TraceabilityInformation info_;
  std::vector<analysis::InferredTuple> pending_;

  std::mutex tokens_mutex_;
  std::map<std::string, Cursor> tokens_;
  std::uint64_t next_token_ = 1;
};

int http_status(ErrorKind kind);

}  // namespace tracer::service
