#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arbcost {

/// Error vocabulary shared by every module. The enumerator name is what the
/// CLI prints on stderr, so keep `error_name` in sync when adding codes.
enum class ErrorCode {
  InvalidArgument,
  StepTooCoarse,
  DegenerateVolatility,
  HeterogeneityRequired,
  NoRealRoot,
  NonPositiveDrift,
  SingularReplication,
  QOutOfRange,
  DeltaCostSaturated,
  NegativeVarianceAugmentation,
  GridTooCoarse,
  NonFinitePath,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::DegenerateVolatility: return "DegenerateVolatility";
    case ErrorCode::HeterogeneityRequired: return "HeterogeneityRequired";
    case ErrorCode::NoRealRoot: return "NoRealRoot";
    case ErrorCode::NonPositiveDrift: return "NonPositiveDrift";
    case ErrorCode::SingularReplication: return "SingularReplication";
    case ErrorCode::QOutOfRange: return "QOutOfRange";
    case ErrorCode::DeltaCostSaturated: return "DeltaCostSaturated";
    case ErrorCode::NegativeVarianceAugmentation: return "NegativeVarianceAugmentation";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NonFinitePath: return "NonFinitePath";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace arbcost
