#include "rlt/core/error.hpp"

namespace rlt {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorKind::DualityViolated: return "DualityViolated";
    case ErrorKind::OffManifold: return "OffManifold";
    case ErrorKind::BasisNotOrthonormal: return "BasisNotOrthonormal";
    case ErrorKind::NotInShrunkSet: return "NotInShrunkSet";
    case ErrorKind::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorKind::NonInvertible: return "NonInvertible";
    case ErrorKind::NotBallPreserving: return "NotBallPreserving";
    case ErrorKind::NoIncidences: return "NoIncidences";
    case ErrorKind::TowerFailed: return "TowerFailed";
    case ErrorKind::RasterOverflow: return "RasterOverflow";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorKind::ExtractionFailed: return "ExtractionFailed";
    case ErrorKind::FlatnessViolated: return "FlatnessViolated";
    case ErrorKind::SeparationFailed: return "SeparationFailed";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace rlt
