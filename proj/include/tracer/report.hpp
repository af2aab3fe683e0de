#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tracer/analyses.hpp"
#include "tracer/error.hpp"
#include "tracer/pipeline.hpp"
#include "tracer/trace_model.hpp"

namespace tracer::report {

using nlohmann::json;

inline constexpr int kSchema = 1;

// Keys are emitted sorted and `ms` only appears with `timing`, so output is
// byte-identical for identical inputs.
json analysis_json(const analysis::AnalysisReport& r, bool timing);
json solution_json(const analysis::Solution& s);
json inferred_json(const analysis::InferredTuple& t);
json dl_json(const pipeline::DlResult& r);
json error_json(const Error& e);

// Workspace links are accepted; `pending` tuples are shown as unaccepted RL edges.
json graph_json(const trace::TraceabilityInformation& info, const std::vector<analysis::InferredTuple>& pending);

std::string dump(const json& j);  // two-space indent, trailing newline

}  // namespace tracer::report
