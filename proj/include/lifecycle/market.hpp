#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace lifecycle {

/// Raw Black-Scholes inputs. Rates are per year, N risky assets.
struct MarketParams {
  double r = 0.0;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::VectorXd p0;
};

/// Validated market with the derived covariance, market price of risk and
/// tangency direction cached. Only constructible through validate().
class Market {
 public:
  static Market validate(const MarketParams& params);
  /// Same derivations without the sign checks on r and mu - r. Used for limit cases
  /// such as r = 0 or a zero market price of risk.
  static Market assume_valid(const MarketParams& params);

  const MarketParams& params() const { return params_; }
  int assets() const { return static_cast<int>(params_.mu.size()); }
  double r() const { return params_.r; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const Eigen::VectorXd& gamma() const { return gamma_; }
  double gamma_sq() const { return gamma_sq_; }
  /// Sigma^{-1}(mu - r 1): exposure direction shared by every policy.
  const Eigen::VectorXd& tangency() const { return tangency_; }

 private:
  Market() = default;
  MarketParams params_;
  Eigen::MatrixXd cov_;
  Eigen::VectorXd gamma_;
  Eigen::VectorXd tangency_;
  double gamma_sq_ = 0.0;
};

double kernel_value(const Market& m, double t, const Eigen::Ref<const Eigen::VectorXd>& w);

/// E[(Z(s)/Z(t))^eta] for s - t = tau.
double kernel_power_moment(const Market& m, double eta, double tau);

inline double log_kernel_power_moment(double r, double gamma_sq, double eta, double tau) {
  return -eta * (r - 0.5 * (eta - 1.0) * gamma_sq) * tau;
}

Eigen::VectorXd stock_price(const Market& m, double t, const Eigen::Ref<const Eigen::VectorXd>& w);

/// Kernel path on a uniform grid; w is stored column-wise (assets x (steps+1)).
struct KernelPath {
  std::vector<double> t;
  std::vector<double> z;
  Eigen::MatrixXd w;
};

/// Independent per-path generator: path i draws the same numbers whatever the thread layout.
std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path);

/// Exact log-normal stepping of one path on `steps` equal steps over [0,horizon].
KernelPath simulate_kernel_path(const Market& m, double horizon, int steps, std::uint64_t seed,
                                std::uint64_t path_index);

std::vector<KernelPath> simulate_kernel_paths(const Market& m, double horizon, int steps, int n_paths,
                                              std::uint64_t seed);

}  // namespace lifecycle
