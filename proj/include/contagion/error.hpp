#pragma once

#include <stdexcept>
#include <string>

namespace contagion {

enum class ErrorCode {
  InvalidArgument,
  EmptyEnvironment,
  NonPositiveWeight,
  WeightsDoNotSumToOne,
  NegativeParameter,
  NonFiniteParameter,
  ConflictingExposure,
  ReciprocityViolated,
  AllAlphasZero,
  GridOutOfRange,
  StepTooCoarse,
  ClampExceeded,
  DimensionMismatch,
  NotAGridPoint,
  ReciprocityRequired,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ReciprocityViolated : public Error {
 public:
  ReciprocityViolated(double max_residual, const std::string& what)
      : Error(ErrorCode::ReciprocityViolated, what), max_residual_(max_residual) {}

  double max_residual() const noexcept { return max_residual_; }

 private:
  double max_residual_;
};

}  // namespace contagion
