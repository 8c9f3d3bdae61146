#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdbell {

enum class ErrorCode {
  InvalidArgument,
  NotSquare,
  NotHermitian,
  DimensionMismatch,
  NotNormalized,
  InvalidModel,
  ScenarioMismatch,
  SignalingDetected,
  SignalingInput,
  ThresholdOutsideRange,
  MaxNotPositive,
  TooLarge,
  NumericalFailure,
  NoStrictlyFeasiblePoint,
  ParseError,
  IncompleteTable,
  ZeroBlock,
  MissingTotals,
  DomainError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hdbell
