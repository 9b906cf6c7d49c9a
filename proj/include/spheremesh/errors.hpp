#pragma once

#include <stdexcept>
#include <string>

namespace spheremesh {

enum class ErrorCode {
  InvalidUnitVector,
  DegenerateVector,
  MagnitudeExceedsInjectivityRadius,
  AntipodalPoints,
  DegenerateConfiguration,
  TriangleNotFound,
  EmptyNeighborhood,
  QuadrantEmpty,
  SingularMomentSystem,
  GradientOutOfRange,
  NonpositiveDensity,
  MassImbalance,
  MaxItersExceeded,
  LinearSolveFailure,
  FallbackDidNotConverge,
  GeodesicDegenerate,
  TangledIntermediateMap,
  UnreliableJacobian,
  NoRadialSolution,
  UnknownDensityName,
  UnsupportedRasterFormat,
  DegenerateRange,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// All library failures are reported through this type; code() identifies
/// the failure class for programmatic handling.
class SphereMeshError : public std::runtime_error {
 public:
  SphereMeshError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw SphereMeshError(code, message);
}

}  // namespace spheremesh
