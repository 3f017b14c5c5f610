#include "edgeflow/error.hpp"

namespace edgeflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NodeIndexOutOfRange: return "NodeIndexOutOfRange";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::MissingEdgeConstraint: return "MissingEdgeConstraint";
    case ErrorCode::OrientationMismatch: return "OrientationMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidObjective: return "InvalidObjective";
    case ErrorCode::MissingNeighbor: return "MissingNeighbor";
    case ErrorCode::UnexpectedNeighbor: return "UnexpectedNeighbor";
    case ErrorCode::NonFiniteDerivative: return "NonFiniteDerivative";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace edgeflow
