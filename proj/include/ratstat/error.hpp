#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratstat {

enum class ErrorCode {
  MalformedInput,
  DimensionMismatch,
  NegativeWeight,
  MissingSymbol,
  ZeroVector,
  ZeroMatrix,
  NotPrimitive,
  NoConvergence,
  Overflow,
  DegenerateValue,
  BudgetExceeded,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::MissingSymbol: return "MissingSymbol";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DegenerateValue: return "DegenerateValue";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// that callers (and the CLI exit-status mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ratstat
