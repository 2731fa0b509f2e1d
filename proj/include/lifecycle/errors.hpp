#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lifecycle {

enum class ErrorCode {
  BadDimension,
  NonPositiveDefinite,
  DriftBelowRiskFree,
  NonFinite,
  NoBracket,
  MaxIterations,
  InfeasibleBudget,
  InfeasibleEndowment,
  InfeasibleParams,
  FloorViolated,
  InvalidPreferences,
  Degenerate,
  ZeroWealth,
  ZeroExpectedWealth,
  NotConstantB,
  MultiAssetUnsupported,
  NonPositivePrice,
  NoConvergence,
  InternalConsistency,
  ConfigError,
  ScenarioParse,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lifecycle
