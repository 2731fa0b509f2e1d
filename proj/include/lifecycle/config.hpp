#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lifecycle/calibration.hpp"
#include "lifecycle/preferences.hpp"

namespace lifecycle {

struct MonteCarloSettings {
  int paths = 10000;
  int steps = 2080;
  int budget_paths = 100000;
};

struct CalibrationSettings {
  ModelVariant variant = ModelVariant::Full;
  int grid_points = 2080;
  OptimizerSpec optimizer;
  /// Empty curves mean the default hump and glide-path targets.
  CurvePtr consumption_target;
  CurvePtr allocation_target;
};

/// Everything a CLI run needs, parsed from one JSON document.
struct RunConfig {
  MarketParams market;
  double horizon = 40.0;
  double v0 = 250000.0;
  PreferenceModel prefs;
  /// Variant whose published parameters filled in the preference curves, if any.
  std::optional<ModelVariant> prefs_variant;
  CashflowModel cashflows;
  QuadSpec quad;
  RootSpec root;
  MonteCarloSettings mc;
  CalibrationSettings calibration;
  std::string output_dir = "out";
  std::uint64_t seed = 20230601;
  /// FNV-1a of the raw document text, hex.
  std::string hash;

  Problem problem() const;
  CalibrationSetup calibration_setup() const;
  CalibrationTarget calibration_target() const;
};

/// Throws Error(ConfigError) with the offending field path, e.g. "market.sigma[0][0]".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string fnv1a_hex(const std::string& text);

}  // namespace lifecycle
