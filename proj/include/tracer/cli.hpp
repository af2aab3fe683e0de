#pragma once

#include <ostream>

#include "tracer/error.hpp"

namespace tracer::cli {

// 0 success, 1 negative analysis result, 2 usage or input error, 3 internal
// failure or resource limit.
int exit_code(ErrorKind kind);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tracer::cli
