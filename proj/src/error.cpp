#include "tracer/error.hpp"

#include <sstream>

namespace tracer {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownLocation: return "UnknownLocation";
    case ErrorKind::UnknownSignature: return "UnknownSignature";
    case ErrorKind::AbstractSignature: return "AbstractSignature";
    case ErrorKind::AmbiguousSignature: return "AmbiguousSignature";
    case ErrorKind::UntypedEndpoint: return "UntypedEndpoint";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::InvalidWorkspace: return "InvalidWorkspace";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::NonBinaryClosure: return "NonBinaryClosure";
    case ErrorKind::UnknownReasonTarget: return "UnknownReasonTarget";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::TupleOutsideType: return "TupleOutsideType";
    case ErrorKind::NonHornFact: return "NonHornFact";
    case ErrorKind::InconsistentPremises: return "InconsistentPremises";
    case ErrorKind::NoSuggestion: return "NoSuggestion";
    case ErrorKind::TypeViolation: return "TypeViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnknownLiteral: return "UnknownLiteral";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::StaleRevision: return "StaleRevision";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

std::string Diagnostic::format(std::string_view path) const {
  std::ostringstream out;
  out << path << ':' << line << ':' << col << ": "
      << (severity == Severity::Error ? "error" : "warning") << ": " << message;
  return out.str();
}

namespace {
std::string join_messages(const std::vector<Diagnostic>& diagnostics) {
  std::string text;
  for (const auto& d : diagnostics) {
    if (d.severity != Diagnostic::Severity::Error) continue;
    if (!text.empty()) text += "; ";
    text += std::to_string(d.line) + ":" + std::to_string(d.col) + ": " + d.message;
  }
  return text.empty() ? "type error" : text;
}
}  // namespace

TypeError::TypeError(ErrorKind kind, std::vector<Diagnostic> diagnostics)
    : Error(kind, join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace tracer
