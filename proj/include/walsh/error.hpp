#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace walsh {

/// Every failure the library can raise. The category groups codes for exit
/// status reporting in the command-line front end.
enum class ErrorCode {
  // malformed input or argument outside an operation's domain
  Overlap,
  Degenerate,
  EmptyInput,
  OnCut,
  NotOnCut,
  PathOnCut,
  InsideE,
  OutsideSupport,
  PoleAtCenter,
  PadTooLarge,
  InvalidArgument,
  // iterative procedure did not finish
  NoConvergence,
  MaxIterExceeded,
  RootNotBracketed,
  BracketFailure,
  RayBracketFailure,
  // a computed quantity violates an identity it must satisfy
  SingularSystem,
  CapacityMismatch,
  NormalizationDefect,
  OrderViolation,
};

enum class ErrorCategory { Input, Convergence, Consistency };

constexpr ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::RootNotBracketed:
    case ErrorCode::BracketFailure:
    case ErrorCode::RayBracketFailure:
      return ErrorCategory::Convergence;
    case ErrorCode::SingularSystem:
    case ErrorCode::CapacityMismatch:
    case ErrorCode::NormalizationDefect:
    case ErrorCode::OrderViolation:
      return ErrorCategory::Consistency;
    default:
      return ErrorCategory::Input;
  }
}

constexpr std::string_view name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Overlap: return "OverlapError";
    case ErrorCode::Degenerate: return "DegenerateError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OnCut: return "OnCutError";
    case ErrorCode::NotOnCut: return "NotOnCut";
    case ErrorCode::PathOnCut: return "PathOnCut";
    case ErrorCode::InsideE: return "InsideE";
    case ErrorCode::OutsideSupport: return "OutsideSupport";
    case ErrorCode::PoleAtCenter: return "PoleAtCenter";
    case ErrorCode::PadTooLarge: return "PadTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::RayBracketFailure: return "RayBracketFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::CapacityMismatch: return "CapacityMismatch";
    case ErrorCode::NormalizationDefect: return "NormalizationDefect";
    case ErrorCode::OrderViolation: return "OrderViolation";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace walsh
