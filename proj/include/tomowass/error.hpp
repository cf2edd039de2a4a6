#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tomowass {

enum class ErrorCode {
  InvalidArgument,
  SubtractFromVacuum,
  UnsupportedAddition,
  AnnihilatedToZero,
  GridMismatch,
  EmptySamples,
  TruncationFailure,
  GridTooNarrow,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SubtractFromVacuum: return "SubtractFromVacuum";
    case ErrorCode::UnsupportedAddition: return "UnsupportedAddition";
    case ErrorCode::AnnihilatedToZero: return "AnnihilatedToZero";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::TruncationFailure: return "TruncationFailure";
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Numerical failures (as opposed to bad input) map to a distinct CLI exit status.
constexpr bool is_numerical(ErrorCode code) noexcept {
  return code == ErrorCode::TruncationFailure || code == ErrorCode::GridTooNarrow ||
         code == ErrorCode::InvariantViolation;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tomowass
