#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lethargy {

enum class ErrorKind {
  InvalidArgument,
  DimMismatch,
  NonIncreasingDims,
  DimExceedsAmbient,
  LinearlyDependentBasis,
  SolverFailure,
  PointInsideSubspace,
  NotStrictlyDecreasing,
  AnchorInsideTop,
  CertificationFailure,
  NoBracket,
  DegenerateTarget,
  PreconditionViolation,
  HeadTies,
  NoAdmissibleStart,
  BracketFailure,
  InsufficientGaps,
  BaseTooSmall,
  ParseError,
  SchemaError,
  CrossFieldError,
  TamperDetected,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lethargy
