#include "contagion/error.hpp"

namespace contagion {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyEnvironment: return "EmptyEnvironment";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::WeightsDoNotSumToOne: return "WeightsDoNotSumToOne";
    case ErrorCode::NegativeParameter: return "NegativeParameter";
    case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::ConflictingExposure: return "ConflictingExposure";
    case ErrorCode::ReciprocityViolated: return "ReciprocityViolated";
    case ErrorCode::AllAlphasZero: return "AllAlphasZero";
    case ErrorCode::GridOutOfRange: return "GridOutOfRange";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::ClampExceeded: return "ClampExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotAGridPoint: return "NotAGridPoint";
    case ErrorCode::ReciprocityRequired: return "ReciprocityRequired";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace contagion
