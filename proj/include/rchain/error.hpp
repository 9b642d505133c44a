#ifndef RCHAIN_ERROR_HPP
#define RCHAIN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace rchain {

enum class ErrorCode {
  NonFinite,
  Overflow,
  LimitExceeded,
  NonHyperbolic,
  NonIntegerOrder,
  NoConvergence,
  Pruned,
  Grazing,
  DegenerateStability,
  PlanInvalid,
  NumericOverflow,
  DenominatorNearZero,
  NoBracket,
  BoundaryZero,
  QuadratureFail,
  IllConditioned,
  Collision,
  LostRoot,
  FoldPoint,
  DegenerateSeed,
  InvalidArgument,
  Internal,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::NonHyperbolic: return "NonHyperbolic";
    case ErrorCode::NonIntegerOrder: return "NonIntegerOrder";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Pruned: return "Pruned";
    case ErrorCode::Grazing: return "Grazing";
    case ErrorCode::DegenerateStability: return "DegenerateStability";
    case ErrorCode::PlanInvalid: return "PlanInvalid";
    case ErrorCode::NumericOverflow: return "NumericOverflow";
    case ErrorCode::DenominatorNearZero: return "DenominatorNearZero";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::BoundaryZero: return "BoundaryZero";
    case ErrorCode::QuadratureFail: return "QuadratureFail";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::Collision: return "Collision";
    case ErrorCode::LostRoot: return "LostRoot";
    case ErrorCode::FoldPoint: return "FoldPoint";
    case ErrorCode::DegenerateSeed: return "DegenerateSeed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Input-validation failures, as opposed to numerical breakdown.
  bool is_validation() const noexcept {
    return code_ == ErrorCode::NonFinite || code_ == ErrorCode::LimitExceeded ||
           code_ == ErrorCode::PlanInvalid || code_ == ErrorCode::InvalidArgument;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rchain

#endif  // RCHAIN_ERROR_HPP
