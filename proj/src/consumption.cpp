#include "lifecycle/consumption.hpp"

#include <cmath>
#include <vector>

#include "lifecycle/errors.hpp"

namespace lifecycle {

namespace {

// log of (1-b) (exp(beta s - b k (s - t)) / a(s))^eta, without the multiplier.
double log_g_base(const Problem& p, double s, double t, double& eta_out) {
  const double b = (*p.prefs.b)(s);
  const double eta = 1.0 / (b - 1.0);
  const double k = p.market.r() - 0.5 * eta * p.market.gamma_sq();
  eta_out = eta;
  return std::log1p(-b) + eta * (p.prefs.beta * s - b * k * (s - t) - std::log((*p.prefs.a)(s)));
}

}  // namespace

double solve_lambda1(const Problem& p, double v1) {
  const double F10 = floor_F1(p, 0.0);
  if (!(v1 > F10))
    throw Error(ErrorCode::InfeasibleBudget,
                "v1=" + std::to_string(v1) + " must exceed F1(0)=" + std::to_string(F10));
  const double T = p.horizon();
  const std::size_t n = p.rule.size();
  std::vector<double> s(n), w(n), base(n), eta(n);
  p.rule.map(0.0, T, s, w);
  for (std::size_t i = 0; i < n; ++i) base[i] = log_g_base(p, s[i], 0.0, eta[i]);
  const double target = v1 - F10;
  const auto budget = [&](double lambda) {
    const double log_lambda = std::log(lambda);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::exp(base[i] + eta[i] * log_lambda);
    return acc - target;
  };
  return find_root_log_decreasing(budget, p.root);
}

ConsumptionSolution::ConsumptionSolution(const Problem& p, double v1)
    : problem_(p), v1_(v1), lambda1_(solve_lambda1(p, v1)) {}

ConsumptionSolution::ConsumptionSolution(const Problem& p, double v1, double lambda1)
    : problem_(p), v1_(v1), lambda1_(lambda1) {
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
    throw Error(ErrorCode::InfeasibleBudget, "lambda1 must be positive and finite");
}

double ConsumptionSolution::log_g_kernel(double s, double t) const {
  double eta = 0.0;
  const double base = log_g_base(problem_, s, t, eta);
  return base + eta * std::log(lambda1_);
}

double ConsumptionSolution::g_kernel(double s, double t) const { return std::exp(log_g_kernel(s, t)); }

double ConsumptionSolution::consumption_rate(double t, double z) const {
  const auto& pr = problem_.prefs;
  const double b = (*pr.b)(t);
  const double eta = 1.0 / (b - 1.0);
  const double log_term = eta * (std::log(lambda1_) + pr.beta * t + std::log(z) - std::log((*pr.a)(t)));
  return (1.0 - b) * std::exp(log_term) + (*problem_.cashflows.cbar)(t);
}

ConsumptionSolution::Moments ConsumptionSolution::moments(double t, double z) const {
  const double T = problem_.horizon();
  if (t >= T) return {0.0, 0.0, 0.0};
  const std::size_t n = problem_.rule.size();
  std::vector<double> s(n), w(n);
  problem_.rule.map(t, T, s, w);
  const double log_z = std::log(z);
  const double log_lambda = std::log(lambda1_);
  const double r = problem_.market.r();
  const auto& cf = problem_.cashflows;
  double cushion = 0.0, y = 0.0, floor = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    const double base = log_g_base(problem_, s[i], t, eta);
    const double term = w[i] * std::exp(base + eta * (log_lambda + log_z));
    cushion += term;
    y += eta * term;
    floor += w[i] * std::exp(-r * (s[i] - t)) * ((*cf.cbar)(s[i]) - (*cf.y)(s[i]));
  }
  return {cushion, y, floor};
}

double ConsumptionSolution::wealth_V1(double t, double z) const {
  const auto m = moments(t, z);
  return m.cushion + m.floor;
}

double ConsumptionSolution::exposure_scale(double t, double z) const { return moments(t, z).y; }

double ConsumptionSolution::t_tilde(double t, double z) const {
  const double T = problem_.horizon();
  if (t >= T) throw Error(ErrorCode::Degenerate, "mean-value time needs t < T");
  const auto& b = *problem_.prefs.b;

  constexpr int kScan = 64;
  std::vector<double> grid(kScan), vals(kScan);
  double bmin = b(t), bmax = b(t);
  for (int i = 0; i < kScan; ++i) {
    grid[i] = t + (T - t) * i / (kScan - 1);
    vals[i] = b(grid[i]);
    bmin = std::min(bmin, vals[i]);
    bmax = std::max(bmax, vals[i]);
  }
  if (bmax - bmin <= 1e-12 * std::max(1.0, std::abs(bmax))) return 0.5 * (t + T);

  const auto m = moments(t, z);
  const double target = 1.0 + m.cushion / m.y;
  const auto h = [&](double s) { return b(s) - target; };
  for (int i = 0; i + 1 < kScan; ++i) {
    const double h0 = vals[i] - target;
    const double h1 = vals[i + 1] - target;
    if (h0 == 0.0) return grid[i];
    if ((h0 < 0.0) != (h1 < 0.0)) return find_root(h, grid[i], grid[i + 1], problem_.root);
  }
  // Target sits on the range boundary (up to round-off): take the closest sample.
  int best = 0;
  for (int i = 1; i < kScan; ++i)
    if (std::abs(vals[i] - target) < std::abs(vals[best] - target)) best = i;
  return grid[best];
}

RiskyPosition ConsumptionSolution::policy_pi1(double t, double z) const {
  const auto m = moments(t, z);
  const auto& dir = problem_.market.tangency();
  RiskyPosition out;
  out.exposure = -m.y * dir;
  const double wealth = m.cushion + m.floor;
  out.multiple = m.cushion > 0.0 ? -m.y / m.cushion : 0.0;
  const double scale = std::max({std::abs(m.cushion), std::abs(m.floor), 1.0});
  out.zero_wealth = std::abs(wealth) <= kZeroWealthTolerance * scale;
  out.weight = out.zero_wealth ? Eigen::VectorXd::Zero(dir.size()) : Eigen::VectorXd(out.exposure / wealth);
  return out;
}

ValueDerivatives value_V1(const Problem& p, double v1) {
  const double lambda = solve_lambda1(p, v1);
  const double log_lambda = std::log(lambda);
  const double T = p.horizon();
  const std::size_t n = p.rule.size();
  std::vector<double> s(n), w(n);
  p.rule.map(0.0, T, s, w);
  double value = 0.0, curvature = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = (*p.prefs.b)(s[i]);
    const double eta = 1.0 / (b - 1.0);
    const double k = p.market.r() - 0.5 * eta * p.market.gamma_sq();
    const double log_h = eta * ((p.prefs.beta - b * k) * s[i] - std::log((*p.prefs.a)(s[i])));
    value += w[i] * (1.0 - b) / b * std::exp(log_h + b * eta * log_lambda);
    curvature += w[i] * std::exp(log_h + (eta - 1.0) * log_lambda);
  }
  return {value, lambda, -1.0 / curvature};
}

}  // namespace lifecycle
