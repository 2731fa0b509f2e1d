#include "lifecycle/calibration.hpp"
#include "lifecycle/merge.hpp"
#include "lifecycle/simulation.hpp"

namespace lifecycle::reference {

Eigen::VectorXd residuals(ModelVariant v, const CalibParams& params, const CalibrationTarget& target,
                          const CalibrationSetup& setup) {
  const Problem problem = make_variant_problem(setup, v, params);
  const MergedPolicy policy = solve_split(problem, setup.v0, {.verify_multiplier = false});
  const auto M = static_cast<Eigen::Index>(target.t.size());
  Eigen::VectorXd out(2 * M);
  for (Eigen::Index k = 0; k < M; ++k) {
    const double t = target.t[k];
    out[k] = (expected_consumption(policy, t) - target.consumption[k]) / target.consumption[k];
    out[M + k] = (expected_allocation_estimator(policy, t).sum() - target.allocation[k]) / target.allocation[k];
  }
  return out;
}

}  // namespace lifecycle::reference
