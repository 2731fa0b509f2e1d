#include "lifecycle/slices.hpp"

#include <cmath>

namespace lifecycle {

PolicySlice build_slice(const MergedPolicy& policy, double t) {
  const auto& p = policy.problem();
  const auto& pr = p.prefs;
  const auto& cf = p.cashflows;
  const double T = p.horizon();
  const double r = p.market.r();
  const double g2 = p.market.gamma_sq();
  const double log_lambda = std::log(policy.lambda1_star());

  PolicySlice sl;
  sl.t = t;
  const std::size_t n = t < T ? p.rule.size() : 0;
  sl.log_coef.resize(static_cast<Eigen::Index>(n));
  sl.eta.resize(static_cast<Eigen::Index>(n));
  if (n > 0) {
    std::vector<double> s(n), w(n);
    p.rule.map(t, T, s, w);
    double floor = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double b = (*pr.b)(s[j]);
      const double eta = 1.0 / (b - 1.0);
      const double k = r - 0.5 * eta * g2;
      sl.eta[j] = eta;
      sl.log_coef[j] = std::log(w[j]) + std::log1p(-b) +
                       eta * (pr.beta * s[j] - b * k * (s[j] - t) - std::log((*pr.a)(s[j])) + log_lambda);
      floor += w[j] * std::exp(-r * (s[j] - t)) * ((*cf.cbar)(s[j]) - (*cf.y)(s[j]));
    }
    sl.F1 = floor;
  }
  sl.F2 = floor_F2(p, t);
  sl.cbar = (*cf.cbar)(t);
  sl.income = (*cf.y)(t);
  const double bt = (*pr.b)(t);
  sl.c_eta = 1.0 / (bt - 1.0);
  sl.log_c = std::log1p(-bt) + sl.c_eta * (log_lambda + pr.beta * t - std::log((*pr.a)(t)));
  const auto& term = policy.terminal();
  sl.log_cushion2 = std::log(term.v2() - term.floor0()) + term.cushion_rate() * t;
  return sl;
}

PolicySlices::PolicySlices(const MergedPolicy& policy, std::vector<double> grid)
    : grid_(std::move(grid)),
      slices_(grid_.size()),
      eta_hat_(1.0 / (policy.problem().prefs.b_hat - 1.0)),
      m2_(1.0 / (1.0 - policy.problem().prefs.b_hat)) {
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t k = 0; k < grid_.size(); ++k) slices_[k] = build_slice(policy, grid_[k]);
}

SliceValues evaluate_slice(const PolicySlice& s, double eta_hat, double multiple_terminal, double log_z,
                           Eigen::ArrayXd& scratch) {
  SliceValues v{};
  if (s.log_coef.size() > 0) {
    scratch = (s.log_coef + s.eta * log_z).exp();
    v.cushion1 = scratch.sum();
    const double y = (s.eta * scratch).sum();
    v.exposure_scale = -y;
  }
  v.cushion2 = std::exp(s.log_cushion2 + eta_hat * log_z);
  v.exposure_scale += multiple_terminal * v.cushion2;
  v.V1 = v.cushion1 + s.F1;
  v.V2 = v.cushion2 + s.F2;
  v.c_star = std::exp(s.log_c + s.c_eta * log_z) + s.cbar;
  return v;
}

SliceValues PolicySlices::evaluate(std::size_t k, double log_z, Eigen::ArrayXd& scratch) const {
  return evaluate_slice(slices_[k], eta_hat_, m2_, log_z, scratch);
}

}  // namespace lifecycle
