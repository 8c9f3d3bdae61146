#include "hdbell/error.hpp"

namespace hdbell {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::ScenarioMismatch: return "ScenarioMismatch";
    case ErrorCode::SignalingDetected: return "SignalingDetected";
    case ErrorCode::SignalingInput: return "SignalingInput";
    case ErrorCode::ThresholdOutsideRange: return "ThresholdOutsideRange";
    case ErrorCode::MaxNotPositive: return "MaxNotPositive";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::NoStrictlyFeasiblePoint: return "NoStrictlyFeasiblePoint";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IncompleteTable: return "IncompleteTable";
    case ErrorCode::ZeroBlock: return "ZeroBlock";
    case ErrorCode::MissingTotals: return "MissingTotals";
    case ErrorCode::DomainError: return "DomainError";
  }
  return "Unknown";
}

}  // namespace hdbell
