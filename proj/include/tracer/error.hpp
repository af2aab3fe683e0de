#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracer {

// Every failure surfaced by the library carries one of these kinds so that
// the CLI and the service can map it onto exit codes / HTTP statuses.
enum class ErrorKind {
  // trace model
  UnknownLocation,
  UnknownSignature,
  AbstractSignature,
  AmbiguousSignature,
  UntypedEndpoint,
  ArityMismatch,
  MalformedDocument,
  InvalidWorkspace,
  // specification language
  SyntaxError,
  ArityError,
  UnknownName,
  NonBinaryClosure,
  UnknownReasonTarget,
  DuplicateName,
  // bounds / analyses
  UnknownTarget,
  TupleOutsideType,
  NonHornFact,
  InconsistentPremises,
  NoSuggestion,
  TypeViolation,
  InvalidArgument,
  // description logic / language
  UnknownLiteral,
  // solver
  ResourceLimit,
  StaleRevision,
  Internal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// A positioned diagnostic, printed as `path:line:col: severity: message`.
struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  int line = 0;
  int col = 0;
  std::string message;

  std::string format(std::string_view path) const;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, std::string expected, const std::string& message)
      : Error(ErrorKind::SyntaxError, message),
        line_(line),
        col_(col),
        expected_(std::move(expected)) {}

  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }
  const std::string& expected() const noexcept { return expected_; }

  Diagnostic diagnostic() const {
    return {Diagnostic::Severity::Error, line_, col_, what()};
  }

 private:
  int line_;
  int col_;
  std::string expected_;
};

// Raised by the type checker; carries every error diagnostic found.
class TypeError : public Error {
 public:
  TypeError(ErrorKind kind, std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace tracer
