#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgeflow {

enum class ErrorCode {
  SelfLoop,
  DuplicateEdge,
  NodeIndexOutOfRange,
  RankDeficient,
  MissingEdgeConstraint,
  OrientationMismatch,
  DimensionMismatch,
  InvalidObjective,
  MissingNeighbor,
  UnexpectedNeighbor,
  NonFiniteDerivative,
  StepUnderflow,
  InvalidConfig,
  Unbounded,
  NoConvergence,
  InsufficientData,
  ValidationFailed,
  ParseError,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; code() identifies
// the failure class, what() carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edgeflow
