#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lifecycle/preferences.hpp"

namespace lifecycle {

enum class ModelVariant { Full, AConst, BConst, BothConst, CrraFull };

std::string_view variant_name(ModelVariant v);
ModelVariant parse_variant(std::string_view name);

/// Targets on the grid t_k = k T / M, k = 0..M-1.
struct CalibrationTarget {
  std::vector<double> t;
  std::vector<double> consumption;
  std::vector<double> allocation;
};

/// Hump-shaped consumption -25 (t-26)^2 + 37,732 and the (100 - age)% glide path with age = t + 25.
CalibrationTarget target_curves_paper(double horizon = 40.0, int points = 2080);
CalibrationTarget make_target(const Curve& consumption, const Curve& allocation, double horizon, int points);

/// a(t) = a0 e^{lam_a t}, b(t) = b0 e^{lam_b t}.
struct CalibParams {
  double b_hat = -1.0;
  double a0 = 1.0;
  double lam_a = 0.0;
  double b0 = -1.0;
  double lam_b = 0.0;
};

/// Published fitted values for each variant; also the centre of the multi-start design.
CalibParams published_params(ModelVariant v);
CalibParams pin(ModelVariant v, CalibParams p);

/// Model inputs that stay fixed while preferences are fitted.
struct CalibrationSetup {
  MarketParams market;
  CashflowModel cashflows;
  double beta = 0.03;
  double a_hat = 1.0;
  double v0 = 250000.0;
  QuadSpec quad;
  RootSpec root;
};

/// Builds the solver problem for a variant; the CRRA variant drops both floors.
Problem make_variant_problem(const CalibrationSetup& setup, ModelVariant v, const CalibParams& params);

struct FittedCurves {
  std::vector<double> t;
  std::vector<double> consumption;
  std::vector<double> consumption_target;
  std::vector<double> allocation;
  std::vector<double> allocation_target;
};

/// Relative residuals [consumption block; allocation block] from closed-form expected curves.
/// Grid points are evaluated in parallel; each point is summed serially so results do not
/// depend on the thread count.
class ResidualEvaluator {
 public:
  ResidualEvaluator(const CalibrationSetup& setup, ModelVariant variant, CalibrationTarget target);

  Eigen::Index size() const { return 2 * static_cast<Eigen::Index>(target_.t.size()); }
  ModelVariant variant() const { return variant_; }
  const CalibrationTarget& target() const { return target_; }

  /// Throws InfeasibleParams when the parameters violate the preference constraints or v0 <= F(0).
  void evaluate(const CalibParams& params, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd operator()(const CalibParams& params) const;
  FittedCurves curves(const CalibParams& params) const;

 private:
  void model_curves(const CalibParams& params, std::vector<double>& c, std::vector<double>& pi) const;

  ModelVariant variant_;
  CalibrationTarget target_;
  double r_, g2_, tangency_sum_, beta_, a_hat_, v0_, T_;
  RootSpec root_;
  Eigen::MatrixXd nodes_;      // quadrature nodes on [t_k, T], one column per grid point
  Eigen::MatrixXd log_w_;      // matching log weights
  Eigen::ArrayXd split_s_, split_w_;
  std::vector<double> F1_, F2_, cbar_;
  double F10_, F20_;
};

Eigen::VectorXd residuals(ModelVariant v, const CalibParams& params, const CalibrationTarget& target,
                          const CalibrationSetup& setup);

double sum_of_squares(const Eigen::Ref<const Eigen::VectorXd>& r);

struct OptimizerSpec {
  int starts = 8;
  std::uint64_t seed = 20230601;
  double spread = 0.5;
  int simplex_max_iter = 400;
  double simplex_size_tol = 1e-5;
  int lm_max_evals = 4000;
  /// Fit b(t) > 0 instead of the default b(t) < 0 branch.
  bool positive_b_branch = false;
};

struct CalibrationResult {
  ModelVariant variant = ModelVariant::Full;
  CalibParams params;
  double ssrd = 0.0;
  double ssrd_consumption = 0.0;
  double ssrd_allocation = 0.0;
  int iterations = 0;
  bool converged = false;
  int best_start = -1;
  std::vector<double> start_ssrd;
};

/// Multi-start fit: Latin-hypercube starts within +-spread of `centre`, a simplex stage,
/// then Levenberg-Marquardt on the transformed parameters.
CalibrationResult fit(ModelVariant v, const CalibrationTarget& target, const CalibrationSetup& setup,
                      const CalibParams& centre, const OptimizerSpec& spec = {});

/// Single local refinement from one start point (no multi-start).
CalibrationResult fit_from(const ResidualEvaluator& eval, const CalibParams& start, const OptimizerSpec& spec);

void write_calibration_json(std::ostream& os, const CalibrationResult& result, const std::string& header_hash,
                            std::uint64_t seed);
void write_calibration_csv(std::ostream& os, const FittedCurves& curves);

namespace reference {

/// Serial route through solve_split and the pointwise expected-value functions.
Eigen::VectorXd residuals(ModelVariant v, const CalibParams& params, const CalibrationTarget& target,
                          const CalibrationSetup& setup);

}  // namespace reference

}  // namespace lifecycle
