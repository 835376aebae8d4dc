#include "reachnav/error.hpp"

namespace reachnav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidPolytope: return "InvalidPolytope";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositiveVoxel: return "NonPositiveVoxel";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::EmptyPolytope: return "EmptyPolytope";
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InsufficientDirections: return "InsufficientDirections";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::GeometryError: return "GeometryError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace reachnav
