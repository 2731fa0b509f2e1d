#pragma once

#include <Eigen/Dense>

#include "lifecycle/preferences.hpp"

namespace lifecycle {

/// Risky position of a (sub-)portfolio. The exposure (currency) is always valid;
/// the weight is exposure / wealth and is flagged when wealth is ~0.
struct RiskyPosition {
  Eigen::VectorXd weight;
  Eigen::VectorXd exposure;
  double multiple = 0.0;
  bool zero_wealth = false;
};

struct ValueDerivatives {
  double value;
  double first;
  double second;
};

/// Multiplier of the consumption-only problem for budget v1 (root of the budget equation).
double solve_lambda1(const Problem& p, double v1);

class ConsumptionSolution {
 public:
  ConsumptionSolution(const Problem& p, double v1);
  /// Uses a multiplier computed elsewhere (the merged problem has it in closed form).
  ConsumptionSolution(const Problem& p, double v1, double lambda1);

  const Problem& problem() const { return problem_; }
  double v1() const { return v1_; }
  double lambda1() const { return lambda1_; }

  double g_kernel(double s, double t) const;
  double log_g_kernel(double s, double t) const;

  double consumption_rate(double t, double z) const;
  double wealth_V1(double t, double z) const;
  /// Y(t) = integral of g(s,t) z^{eta_s} / (b(s)-1) over [t,T]; the exposure is -Y * tangency.
  double exposure_scale(double t, double z) const;
  double t_tilde(double t, double z) const;
  RiskyPosition policy_pi1(double t, double z) const;

 private:
  struct Moments {
    double cushion;  // V1 - F1
    double y;        // Y(t)
    double floor;    // F1(t)
  };
  Moments moments(double t, double z) const;

  Problem problem_;
  double v1_;
  double lambda1_;
};

ValueDerivatives value_V1(const Problem& p, double v1);

/// Relative wealth below which weights are reported as degenerate.
inline constexpr double kZeroWealthTolerance = 1e-9;

}  // namespace lifecycle
