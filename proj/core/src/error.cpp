#include "actrec/error.hpp"

namespace actrec {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FieldCountMismatch: return "FieldCountMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NonOrthonormalBeyondTolerance: return "NonOrthonormalBeyondTolerance";
    case ErrorCode::EmptyScript: return "EmptyScript";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::InvalidRotation: return "InvalidRotation";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::JointBehindCamera: return "JointBehindCamera";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateCluster: return "DegenerateCluster";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingActivityData: return "MissingActivityData";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::UninitializedState: return "UninitializedState";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FieldCountMismatch:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::NonOrthonormalBeyondTolerance:
    case ErrorCode::EmptyScript:
    case ErrorCode::MalformedInput:
    case ErrorCode::MissingFile:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace actrec
