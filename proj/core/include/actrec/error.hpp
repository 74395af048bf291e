#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace actrec {

enum class ErrorCode {
  // input / usage
  FieldCountMismatch,
  NonFiniteValue,
  NonOrthonormalBeyondTolerance,
  EmptyScript,
  MalformedInput,
  MissingFile,
  // numeric / model
  InvalidRotation,
  DegenerateBox,
  JointBehindCamera,
  TooFewSamples,
  DegenerateCluster,
  DimensionMismatch,
  MissingActivityData,
  WindowTooLong,
  UninitializedState,
  DegenerateLabels,
  InvalidModel,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that describe bad input rather than a numeric or model failure.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace actrec
