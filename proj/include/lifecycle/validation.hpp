#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lifecycle/merge.hpp"

namespace lifecycle {

/// Copy of `policy` whose consumption multiplier is scaled by `scale` while v1* and the
/// terminal part stay put. Used to check that the budget test can detect a wrong multiplier.
MergedPolicy perturb_multiplier(const MergedPolicy& policy, double scale);

struct EquivalenceReport {
  double max_rel_consumption = 0.0;
  double max_rel_allocation = 0.0;
  double max_rel_wealth = 0.0;
  int points = 0;
};

/// Merged solver against the constant-b closed form at random (t, z). `p` must have b(t) = b_hat.
EquivalenceReport constant_b_equivalence(const Problem& p, double v0, int points, std::uint64_t seed);

struct GradientReport {
  double max_rel_consumption = 0.0;  // |dV1/dv1 - lambda1| / lambda1
  double max_rel_terminal = 0.0;     // |dV2/dv2 - lambda2| / lambda2
  int levels = 0;
};

/// Central differences of both value functions at `levels` budgets spread over (0, 2] times
/// the free endowment v0 - F(0), above the respective floors.
GradientReport gradient_check(const Problem& p, double v0, int levels);

struct SelfFinancingStudy {
  std::vector<int> steps_per_year;
  std::vector<double> mean_error;   // mean over paths of the per-path max tracking error
  std::vector<double> worst_error;  // max over paths
  int paths = 0;
};

/// Euler replication on nested grids: one Brownian path per index at the finest common
/// resolution, sampled down to each requested grid.
SelfFinancingStudy self_financing_study(const MergedPolicy& policy, const std::vector<int>& steps_per_year,
                                        int n_paths, std::uint64_t seed);

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  int budget_paths = 100000;
  int budget_steps = 2080;
  int floor_paths = 10000;
  int floor_steps = 2080;
  int self_financing_paths = 16;
  int equivalence_points = 200;
  int gradient_levels = 10;
  double lambda_scale = 1.0;
  std::uint64_t seed = 20230601;
};

/// Budget equality, floor preservation, constant-b equivalence, value-function gradients and
/// self-financing for the problem and endowment given.
std::vector<PropertyResult> run_validation(const Problem& p, double v0, const ValidationOptions& options);

/// True when b(t) equals b_hat on the validation grid.
bool has_constant_b(const Problem& p);

}  // namespace lifecycle
