#include "lifecycle/errors.hpp"

namespace lifecycle {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::DriftBelowRiskFree: return "DriftBelowRiskFree";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::InfeasibleEndowment: return "InfeasibleEndowment";
    case ErrorCode::InfeasibleParams: return "InfeasibleParams";
    case ErrorCode::FloorViolated: return "FloorViolated";
    case ErrorCode::InvalidPreferences: return "InvalidPreferences";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::ZeroWealth: return "ZeroWealth";
    case ErrorCode::ZeroExpectedWealth: return "ZeroExpectedWealth";
    case ErrorCode::NotConstantB: return "NotConstantB";
    case ErrorCode::MultiAssetUnsupported: return "MultiAssetUnsupported";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InternalConsistency: return "InternalConsistency";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ScenarioParse: return "ScenarioParse";
  }
  return "Unknown";
}

}  // namespace lifecycle
