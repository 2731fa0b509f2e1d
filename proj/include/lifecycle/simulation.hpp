#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lifecycle/market.hpp"
#include "lifecycle/merge.hpp"
#include "lifecycle/slices.hpp"

namespace lifecycle {

/// One simulated or replayed path. Matrices are assets x (steps + 1).
struct PathRecord {
  std::vector<double> t;
  std::vector<double> z;
  Eigen::MatrixXd w;
  Eigen::MatrixXd prices;
  Eigen::MatrixXd pi;
  Eigen::MatrixXd exposure;
  std::vector<double> c_star;
  std::vector<double> V_star;
  std::vector<double> V1;
  std::vector<double> V2;
  std::vector<double> F_t;
  std::vector<double> income;

  std::size_t size() const { return t.size(); }
};

struct ExpectedCurves {
  std::vector<double> t;
  std::vector<double> c_star;
  std::vector<double> V_star;
  Eigen::MatrixXd exposure;   // assets x grid
  Eigen::MatrixXd estimator;  // exposure / V_star
};

double expected_consumption(const MergedPolicy& policy, double t);
double expected_wealth(const MergedPolicy& policy, double t);
Eigen::VectorXd expected_exposure(const MergedPolicy& policy, double t);
/// E[exposure] / E[V*]. Throws ZeroExpectedWealth when E[V*] is ~0.
Eigen::VectorXd expected_allocation_estimator(const MergedPolicy& policy, double t);

/// Parallel over grid points.
ExpectedCurves expected_curves(const MergedPolicy& policy, const std::vector<double>& grid);

std::vector<double> uniform_grid(double horizon, int steps);

/// Evaluates the policy along a kernel path, building each time slice on the fly.
PathRecord record_path(const MergedPolicy& policy, const KernelPath& path);
/// Same, with tables shared across paths on the path's grid.
PathRecord record_path(const MergedPolicy& policy, const PolicySlices& slices, const KernelPath& path);

/// Paths are generated and evaluated in parallel; path i only depends on (seed, i).
std::vector<PathRecord> simulate_policy(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed);

/// Single-asset replay of an observed price series starting at p0.
PathRecord replay_scenario(const MergedPolicy& policy, const std::vector<double>& t,
                           const std::vector<double>& price);

/// Euler replication with the recorded consumption, income and risky exposure. Returns
/// max_k |V_euler - V*| / (|V*| + 1). The path grid must be uniform with spacing dt.
double verify_self_financing(const MergedPolicy& policy, const PathRecord& path, double dt);

/// Keeps every `stride`-th grid point (the Brownian path is unchanged).
PathRecord subsample(const PathRecord& path, int stride);

struct BudgetEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  int paths = 0;
  double z_score() const { return std_error > 0.0 ? (mean - target) / std_error : 0.0; }
};

/// Monte Carlo estimate of E[int Z c* dt + Z(T) V*(T)] (trapezoid in time) against
/// v0 + int exp(-rt) y dt.
BudgetEstimate budget_check(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed);

struct FloorScan {
  long wealth_violations = 0;
  long consumption_violations = 0;
  double min_wealth_cushion = 0.0;
  double min_consumption_cushion = 0.0;
  int paths = 0;
};

FloorScan floor_scan(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed);

/// Cross-section quantiles of V*, c* and pi_1 per grid point.
struct QuantileSummary {
  std::vector<double> t;
  std::vector<double> probs;
  Eigen::MatrixXd V_star;  // probs x grid
  Eigen::MatrixXd c_star;
  Eigen::MatrixXd pi1;
};

QuantileSummary summarize_paths(const std::vector<PathRecord>& paths, const std::vector<double>& probs);

struct SimulationSummary {
  QuantileSummary quantiles;      // on every `stride`-th step
  std::vector<PathRecord> kept;   // the first paths in full
  long floor_violations = 0;      // steps with V* <= F(t) or c* <= cbar(t)
  int paths = 0;
  int stride = 1;
};

/// Streams paths in batches so large runs keep only the quantile samples and `keep_paths`
/// full records in memory. Paths match simulate_policy for the same seed.
SimulationSummary simulate_summary(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed,
                                   const std::vector<double>& probs, int keep_paths, int max_quantile_points = 521);

void write_path_header(std::ostream& os, Eigen::Index assets, bool with_path);
/// With path_index >= 0 every row is prefixed by the index so several paths can share one file.
void write_path_csv(std::ostream& os, const PathRecord& path, int path_index = -1, bool header = true);
void write_expected_csv(std::ostream& os, const ExpectedCurves& curves);
void write_quantile_csv(std::ostream& os, const QuantileSummary& q);

/// Serial implementations built on the pointwise API, kept to cross-check the parallel kernels.
namespace reference {

ExpectedCurves expected_curves(const MergedPolicy& policy, const std::vector<double>& grid);
PathRecord record_path(const MergedPolicy& policy, const KernelPath& path);
BudgetEstimate budget_check(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed);
FloorScan floor_scan(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed);

}  // namespace reference

}  // namespace lifecycle
