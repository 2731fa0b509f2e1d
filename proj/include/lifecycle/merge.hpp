#pragma once

#include <Eigen/Dense>
#include <span>

#include "lifecycle/consumption.hpp"
#include "lifecycle/terminal.hpp"

namespace lifecycle {

/// Weight function of the budget split between the consumption and terminal sub-problems.
double chi(const Problem& p, double t);

class MergedPolicy {
 public:
  MergedPolicy(double v0, double v1_star, double lambda1_star, ConsumptionSolution c, TerminalSolution w)
      : v0_(v0), v1_star_(v1_star), lambda1_star_(lambda1_star), consumption_(std::move(c)), terminal_(std::move(w)) {}

  double v0() const { return v0_; }
  double v1_star() const { return v1_star_; }
  double v2_star() const { return v0_ - v1_star_; }
  double lambda1_star() const { return lambda1_star_; }
  const ConsumptionSolution& consumption() const { return consumption_; }
  const TerminalSolution& terminal() const { return terminal_; }
  const Problem& problem() const { return consumption_.problem(); }

  /// Number of adjacent evaluations of the split equation that were out of order during the solve.
  int nonmonotone_split_evals = 0;

 private:
  double v0_;
  double v1_star_;
  double lambda1_star_;
  ConsumptionSolution consumption_;
  TerminalSolution terminal_;
};

struct SplitOptions {
  /// Re-solve the consumption budget equation at v1* and compare multipliers.
  bool verify_multiplier = true;
  double multiplier_tolerance = 1e-6;
};

/// Optimal split of v0. Throws InfeasibleEndowment when v0 <= F(0).
MergedPolicy solve_split(const Problem& p, double v0, const SplitOptions& options = {});

struct PolicyState {
  double t = 0.0;
  double z = 1.0;
  double c_star = 0.0;
  Eigen::VectorXd pi_star;
  Eigen::VectorXd exposure;
  double V_star = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double F_t = 0.0;
  double F1_t = 0.0;
  double F2_t = 0.0;
  double t_tilde = 0.0;
  double multiple_consumption = 0.0;
  double multiple_terminal = 0.0;
  bool zero_wealth = false;
};

PolicyState policy_at(const MergedPolicy& policy, double t, double z, bool with_t_tilde = true);

/// Closed form for b(t) identically equal to b_hat. Throws NotConstantB otherwise.
PolicyState policy_constant_b(const Problem& p, double v0, double t, double z);

struct PolicySplit {
  Eigen::VectorXd base;        // multiple on (V* - F) / V*
  Eigen::VectorXd correction;  // sub-portfolio term
  Eigen::VectorXd total;
};

struct PolicyDecomposition {
  double b_tilde = 0.0;
  double correction_coefficient = 0.0;  // (b_hat - b_tilde) / ((1 - b_hat)(1 - b_tilde))
  PolicySplit ppi_pair;                 // PPI on V* with floor F plus PPI on V2 with floor F2
  PolicySplit cppi_plus_ppi;            // CPPI on V* with floor F plus PPI on V1 with floor F1
};

PolicyDecomposition decompose_policy(const MergedPolicy& policy, double t, double z);

}  // namespace lifecycle

namespace lifecycle::detail {

/// Root v1* of x - sum_i w_i exp(log_chi_i + expo_i log(v0 - x - F2(0))) - F1(0) on the
/// open feasible interval. Shared by the pointwise solver and the calibration kernels.
double solve_split_equation(std::span<const double> w, std::span<const double> log_chi,
                            std::span<const double> expo, double v0, double F10, double F20,
                            const RootSpec& spec, int* nonmonotone = nullptr);

/// log chi(s) for the exponential-free inputs b(s), log a(s).
double log_chi(double b, double log_a, double s, double beta, double log_a_hat, double b_hat, double r,
               double gamma_sq, double T);

}  // namespace lifecycle::detail
