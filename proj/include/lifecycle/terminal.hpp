#pragma once

#include "lifecycle/consumption.hpp"

namespace lifecycle {

double solve_lambda2(const Problem& p, double v2);

/// Closed-form solution of the terminal-wealth problem.
class TerminalSolution {
 public:
  TerminalSolution(const Problem& p, double v2);

  double v2() const { return v2_; }
  double lambda2() const { return lambda2_; }
  double floor0() const { return floor0_; }

  /// Growth rate kappa of the cushion: cushion(t) = (v2 - F2(0)) e^{kappa t} z^{1/(b_hat-1)}.
  double cushion_rate() const { return kappa_; }
  double wealth_V2(double t, double z) const;
  RiskyPosition policy_pi2(double t, double z) const;

 private:
  Eigen::VectorXd tangency_;
  double r_;
  double horizon_;
  double floor_;
  double b_hat_;
  double v2_;
  double lambda2_;
  double floor0_;
  double kappa_;
};

ValueDerivatives value_V2(const Problem& p, double v2);

}  // namespace lifecycle
