#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reachnav {

enum class ErrorCode {
  // geometry
  EmptyInput,
  DegenerateInput,
  ZeroDirection,
  DimensionMismatch,
  InvalidPolytope,
  // point clouds
  MissingHeader,
  UnsupportedFormat,
  CountMismatch,
  MalformedRow,
  NonPositiveVoxel,
  TooFewPoints,
  // convex programs
  Unbounded,
  EmptyPolytope,
  // reachability
  InvalidHorizon,
  GridMismatch,
  InsufficientDirections,
  // planning and scenarios
  InvalidScenario,
  SchemaError,
  GeometryError,
  IoError,
  PlacementFailure,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace reachnav
