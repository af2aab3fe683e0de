#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "tracer/forl.hpp"
#include "tracer/relational.hpp"
#include "tracer/trace_model.hpp"

namespace tracer::testing {

inline std::string data_path(const std::string& name) { return std::string(TRACER_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data(const std::string& name) { return slurp(data_path(name)); }

inline const forl::TypedSpec& sidp_spec() {
  static const forl::TypedSpec spec = forl::load_spec(data("sidp.forl"));
  return spec;
}

inline trace::TraceabilityInformation workspace(const std::string& name) { return trace::load(data(name)); }

inline rel::Instance instance(const std::string& name, const forl::TypedSpec& spec = sidp_spec()) {
  return trace::to_relational(workspace(name), spec);
}

}  // namespace tracer::testing
