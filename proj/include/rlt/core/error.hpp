#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rlt {

enum class ErrorKind {
  InvalidArgument,
  EmptySet,
  ResolutionTooCoarse,
  DualityViolated,
  OffManifold,
  BasisNotOrthonormal,
  NotInShrunkSet,
  DeltaOutOfRange,
  NonInvertible,
  NotBallPreserving,
  NoIncidences,
  TowerFailed,
  RasterOverflow,
  HypothesisViolated,
  DimensionUnsupported,
  ExtractionFailed,
  FlatnessViolated,
  SeparationFailed,
  UnknownSuite,
  ConfigInvalid,
};

std::string_view error_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rlt
