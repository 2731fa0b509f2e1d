#include "lifecycle/market.hpp"

#include <cmath>
#include <string>

#include "lifecycle/errors.hpp"

namespace lifecycle {

namespace {

void check_dimensions(const MarketParams& params) {
  const auto n = params.mu.size();
  if (n < 1 || params.sigma.rows() != n || params.sigma.cols() != n || params.p0.size() != n)
    throw Error(ErrorCode::BadDimension, "market needs N >= 1 with mu, sigma (NxN) and p0 consistent");
}

}  // namespace

Market Market::validate(const MarketParams& params) {
  check_dimensions(params);
  const auto n = params.mu.size();
  if (!std::isfinite(params.r) || !(params.r > 0.0))
    throw Error(ErrorCode::DriftBelowRiskFree, "risk-free rate must be positive");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(params.mu[i] - params.r > 0.0))
      throw Error(ErrorCode::DriftBelowRiskFree, "mu[" + std::to_string(i) + "] must exceed r");
    if (!(params.p0[i] > 0.0)) throw Error(ErrorCode::NonPositivePrice, "initial prices must be positive");
  }
  return assume_valid(params);
}

Market Market::assume_valid(const MarketParams& params) {
  check_dimensions(params);
  Market m;
  m.params_ = params;
  m.cov_ = params.sigma * params.sigma.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.cov_, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, m.cov_.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() <= 1e-14 * scale)
    throw Error(ErrorCode::NonPositiveDefinite, "sigma sigma' is not positive definite");

  const Eigen::VectorXd excess = params.mu.array() - params.r;
  m.gamma_ = params.sigma.partialPivLu().solve(excess);
  if (!m.gamma_.allFinite()) throw Error(ErrorCode::NonPositiveDefinite, "market price of risk is not finite");
  m.gamma_sq_ = m.gamma_.squaredNorm();
  m.tangency_ = m.cov_.ldlt().solve(excess);
  return m;
}

double kernel_value(const Market& m, double t, const Eigen::Ref<const Eigen::VectorXd>& w) {
  return std::exp(-(m.r() + 0.5 * m.gamma_sq()) * t - m.gamma().dot(w));
}

double kernel_power_moment(const Market& m, double eta, double tau) {
  return std::exp(log_kernel_power_moment(m.r(), m.gamma_sq(), eta, tau));
}

Eigen::VectorXd stock_price(const Market& m, double t, const Eigen::Ref<const Eigen::VectorXd>& w) {
  const auto& p = m.params();
  Eigen::VectorXd out(m.assets());
  for (int i = 0; i < m.assets(); ++i) {
    const double var = p.sigma.row(i).squaredNorm();
    out[i] = p.p0[i] * std::exp((p.mu[i] - 0.5 * var) * t + p.sigma.row(i).dot(w));
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(path + 1)), path};
  return std::mt19937_64(seq);
}

KernelPath simulate_kernel_path(const Market& m, double horizon, int steps, std::uint64_t seed,
                                std::uint64_t path_index) {
  if (steps < 1) throw Error(ErrorCode::Degenerate, "steps must be >= 1");
  const int n = m.assets();
  const double dt = horizon / steps;
  const double sq = std::sqrt(dt);
  const double drift = -(m.r() + 0.5 * m.gamma_sq()) * dt;

  KernelPath path;
  path.t.resize(steps + 1);
  path.z.resize(steps + 1);
  path.w = Eigen::MatrixXd::Zero(n, steps + 1);
  auto rng = path_rng(seed, path_index);
  std::normal_distribution<double> normal;
  Eigen::VectorXd dw(n);
  double log_z = 0.0;
  path.t[0] = 0.0;
  path.z[0] = 1.0;
  for (int k = 1; k <= steps; ++k) {
    for (int i = 0; i < n; ++i) dw[i] = sq * normal(rng);
    path.w.col(k) = path.w.col(k - 1) + dw;
    log_z += drift - m.gamma().dot(dw);
    path.t[k] = k * dt;
    path.z[k] = std::exp(log_z);
  }
  return path;
}

std::vector<KernelPath> simulate_kernel_paths(const Market& m, double horizon, int steps, int n_paths,
                                              std::uint64_t seed) {
  if (n_paths < 1) throw Error(ErrorCode::Degenerate, "n_paths must be >= 1");
  std::vector<KernelPath> out(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n_paths; ++p)
    out[p] = simulate_kernel_path(m, horizon, steps, seed, static_cast<std::uint64_t>(p));
  return out;
}

}  // namespace lifecycle
