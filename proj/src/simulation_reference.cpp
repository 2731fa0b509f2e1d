#include <algorithm>
#include <cmath>

#include "lifecycle/errors.hpp"
#include "lifecycle/simulation.hpp"

namespace lifecycle::reference {

ExpectedCurves expected_curves(const MergedPolicy& policy, const std::vector<double>& grid) {
  const int assets = policy.problem().market.assets();
  ExpectedCurves out;
  out.t = grid;
  out.c_star.resize(grid.size());
  out.V_star.resize(grid.size());
  out.exposure.resize(assets, static_cast<Eigen::Index>(grid.size()));
  out.estimator.resize(assets, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.c_star[k] = expected_consumption(policy, grid[k]);
    out.V_star[k] = expected_wealth(policy, grid[k]);
    out.exposure.col(kk) = expected_exposure(policy, grid[k]);
    out.estimator.col(kk) = out.exposure.col(kk) / out.V_star[k];
  }
  return out;
}

PathRecord record_path(const MergedPolicy& policy, const KernelPath& path) {
  const auto& m = policy.problem().market;
  const std::size_t n = path.t.size();
  const auto nn = static_cast<Eigen::Index>(n);
  PathRecord rec;
  rec.t = path.t;
  rec.z = path.z;
  rec.w = path.w;
  rec.prices.resize(m.assets(), nn);
  rec.pi.resize(m.assets(), nn);
  rec.exposure.resize(m.assets(), nn);
  rec.c_star.resize(n);
  rec.V_star.resize(n);
  rec.V1.resize(n);
  rec.V2.resize(n);
  rec.F_t.resize(n);
  rec.income.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const auto st = policy_at(policy, path.t[k], path.z[k], false);
    rec.prices.col(kk) = stock_price(m, path.t[k], path.w.col(kk));
    rec.pi.col(kk) = st.pi_star;
    rec.exposure.col(kk) = st.exposure;
    rec.c_star[k] = st.c_star;
    rec.V_star[k] = st.V_star;
    rec.V1[k] = st.V1;
    rec.V2[k] = st.V2;
    rec.F_t[k] = st.F_t;
    rec.income[k] = (*policy.problem().cashflows.y)(path.t[k]);
  }
  return rec;
}

BudgetEstimate budget_check(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed) {
  const auto& p = policy.problem();
  const double T = p.horizon();
  const double dt = T / steps;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(n_paths));
  for (int i = 0; i < n_paths; ++i) {
    const auto path = simulate_kernel_path(p.market, T, steps, seed, static_cast<std::uint64_t>(i));
    double integral = 0.0;
    double prev = path.z[0] * policy.consumption().consumption_rate(0.0, path.z[0]);
    for (int k = 1; k <= steps; ++k) {
      const double cur = path.z[k] * policy.consumption().consumption_rate(path.t[k], path.z[k]);
      integral += 0.5 * dt * (prev + cur);
      prev = cur;
    }
    samples.push_back(integral + path.z.back() * policy.terminal().wealth_V2(T, path.z.back()));
  }
  BudgetEstimate est;
  est.paths = n_paths;
  double sum = 0.0, sq = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / n_paths;
  for (double x : samples) sq += (x - est.mean) * (x - est.mean);
  est.std_error = n_paths > 1 ? std::sqrt(sq / (n_paths - 1) / n_paths) : 0.0;
  est.target = policy.v0() + integrate([&](double s) { return std::exp(-p.market.r() * s) * (*p.cashflows.y)(s); },
                                       0.0, T, p.quad);
  return est;
}

FloorScan floor_scan(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed) {
  const auto& p = policy.problem();
  FloorScan out;
  out.paths = n_paths;
  out.min_wealth_cushion = INFINITY;
  out.min_consumption_cushion = INFINITY;
  for (int i = 0; i < n_paths; ++i) {
    const auto path = simulate_kernel_path(p.market, p.horizon(), steps, seed, static_cast<std::uint64_t>(i));
    for (std::size_t k = 0; k < path.t.size(); ++k) {
      const auto st = policy_at(policy, path.t[k], path.z[k], false);
      const double wc = st.V_star - st.F_t;
      const double cc = st.c_star - (*p.cashflows.cbar)(path.t[k]);
      if (!(wc > 0.0)) ++out.wealth_violations;
      if (!(cc > 0.0)) ++out.consumption_violations;
      out.min_wealth_cushion = std::min(out.min_wealth_cushion, wc);
      out.min_consumption_cushion = std::min(out.min_consumption_cushion, cc);
    }
  }
  return out;
}

}  // namespace lifecycle::reference
