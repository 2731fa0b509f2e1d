#include "lifecycle/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "lifecycle/calibration.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/simulation.hpp"

namespace lifecycle {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

MergedPolicy perturb_multiplier(const MergedPolicy& policy, double scale) {
  const double lambda = policy.lambda1_star() * scale;
  return MergedPolicy(policy.v0(), policy.v1_star(), lambda,
                      ConsumptionSolution(policy.problem(), policy.v1_star(), lambda), policy.terminal());
}

bool has_constant_b(const Problem& p) {
  const double T = p.horizon();
  for (int k = 0; k <= 2080; ++k)
    if (std::abs((*p.prefs.b)(T * k / 2080.0) - p.prefs.b_hat) > 1e-12) return false;
  return true;
}

EquivalenceReport constant_b_equivalence(const Problem& p, double v0, int points, std::uint64_t seed) {
  const MergedPolicy policy = solve_split(p, v0);
  const double g2 = p.market.gamma_sq();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  EquivalenceReport rep;
  rep.points = points;
  for (int i = 0; i < points; ++i) {
    const double t = unit(rng) * p.horizon();
    const double log_z = -(p.market.r() + 0.5 * g2) * t + std::sqrt(g2 * t) * normal(rng);
    const double z = std::exp(log_z);
    const PolicyState general = policy_at(policy, t, z);
    const PolicyState closed = policy_constant_b(p, v0, t, z);
    rep.max_rel_consumption = std::max(rep.max_rel_consumption, rel(general.c_star, closed.c_star));
    rep.max_rel_wealth = std::max(rep.max_rel_wealth, rel(general.V_star, closed.V_star));
    rep.max_rel_allocation = std::max(
        rep.max_rel_allocation, (general.pi_star - closed.pi_star).norm() / std::max(closed.pi_star.norm(), 1e-300));
  }
  return rep;
}

GradientReport gradient_check(const Problem& p, double v0, int levels) {
  const double F1 = floor_F1(p, 0.0);
  const double F2 = floor_F2(p, 0.0);
  const double free = v0 - F1 - F2;
  if (!(free > 0.0)) throw Error(ErrorCode::InfeasibleEndowment, "v0 must exceed F(0) for the gradient check");
  GradientReport rep;
  rep.levels = levels;
  for (int k = 0; k < levels; ++k) {
    const double cushion = free * 2.0 * (k + 1) / levels;
    const double h = 1e-4 * cushion;
    const double v1 = F1 + cushion;
    const double d1 = (value_V1(p, v1 + h).value - value_V1(p, v1 - h).value) / (2.0 * h);
    rep.max_rel_consumption = std::max(rep.max_rel_consumption, rel(d1, solve_lambda1(p, v1)));
    const double v2 = F2 + cushion;
    const double d2 = (value_V2(p, v2 + h).value - value_V2(p, v2 - h).value) / (2.0 * h);
    rep.max_rel_terminal = std::max(rep.max_rel_terminal, rel(d2, solve_lambda2(p, v2)));
  }
  return rep;
}

SelfFinancingStudy self_financing_study(const MergedPolicy& policy, const std::vector<int>& steps_per_year,
                                        int n_paths, std::uint64_t seed) {
  if (steps_per_year.empty() || n_paths < 1) throw Error(ErrorCode::Degenerate, "empty self-financing study");
  const auto& p = policy.problem();
  const double T = p.horizon();
  if (std::abs(T - std::round(T)) > 1e-12) throw Error(ErrorCode::Degenerate, "study needs an integer horizon");
  const int years = static_cast<int>(std::round(T));
  int fine = 1;
  for (int s : steps_per_year) fine = std::lcm(fine, s);

  SelfFinancingStudy st;
  st.steps_per_year = steps_per_year;
  st.paths = n_paths;
  const std::size_t R = steps_per_year.size();
  std::vector<double> err(R * static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_paths; ++i) {
    const KernelPath full = simulate_kernel_path(p.market, T, fine * years, seed, static_cast<std::uint64_t>(i));
    for (std::size_t r = 0; r < R; ++r) {
      const int stride = fine / steps_per_year[r];
      const int n = steps_per_year[r] * years;
      KernelPath kp;
      kp.t.resize(n + 1);
      kp.z.resize(n + 1);
      kp.w.resize(full.w.rows(), n + 1);
      for (int k = 0; k <= n; ++k) {
        kp.t[k] = static_cast<double>(k) / steps_per_year[r];
        kp.z[k] = full.z[static_cast<std::size_t>(k) * stride];
        kp.w.col(k) = full.w.col(static_cast<Eigen::Index>(k) * stride);
      }
      const PathRecord rec = record_path(policy, kp);
      err[r * n_paths + i] = verify_self_financing(policy, rec, 1.0 / steps_per_year[r]);
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    const auto first = err.begin() + static_cast<std::ptrdiff_t>(r * n_paths);
    const auto last = first + n_paths;
    st.mean_error.push_back(std::accumulate(first, last, 0.0) / n_paths);
    st.worst_error.push_back(*std::max_element(first, last));
  }
  return st;
}

std::vector<PropertyResult> run_validation(const Problem& p, double v0, const ValidationOptions& o) {
  std::vector<PropertyResult> out;
  const MergedPolicy base = solve_split(p, v0);
  const MergedPolicy policy = o.lambda_scale == 1.0 ? base : perturb_multiplier(base, o.lambda_scale);

  {
    const BudgetEstimate b = budget_check(policy, o.budget_steps, o.budget_paths, o.seed);
    out.push_back({"budget_equality", std::abs(b.z_score()) <= 3.0,
                   format("mean=%.6f target=%.6f se=%.6f z=%.3f paths=%d", b.mean, b.target, b.std_error,
                          b.z_score(), b.paths)});
  }
  {
    const FloorScan f = floor_scan(policy, o.floor_steps, o.floor_paths, o.seed + 1);
    out.push_back({"floor_preservation", f.wealth_violations == 0 && f.consumption_violations == 0,
                   format("wealth_violations=%ld consumption_violations=%ld min_wealth_cushion=%.6g "
                          "min_consumption_cushion=%.6g paths=%d",
                          f.wealth_violations, f.consumption_violations, f.min_wealth_cushion,
                          f.min_consumption_cushion, f.paths)});
  }
  {
    // A time-varying b is swapped for the published constant-b fit so the closed form applies.
    std::string which = "config";
    const Problem q = [&] {
      if (has_constant_b(p)) return p;
      which = "BOTH_CONST with b = b_hat";
      PreferenceModel prefs = p.prefs;
      const CalibParams c = published_params(ModelVariant::BothConst);
      prefs.b_hat = c.b_hat;
      prefs.a = make_constant(c.a0);
      prefs.b = make_constant(c.b_hat);
      return Problem(p.market, prefs, p.cashflows, p.quad, p.root);
    }();
    const EquivalenceReport e = constant_b_equivalence(q, v0, o.equivalence_points, o.seed + 2);
    const double worst = std::max({e.max_rel_consumption, e.max_rel_allocation, e.max_rel_wealth});
    out.push_back({"constant_b_equivalence", worst <= 1e-8,
                   format("prefs=%s c=%.3e pi=%.3e V=%.3e points=%d", which.c_str(), e.max_rel_consumption,
                          e.max_rel_allocation, e.max_rel_wealth, e.points)});
  }
  {
    const GradientReport g = gradient_check(p, v0, o.gradient_levels);
    out.push_back({"value_gradients", g.max_rel_consumption <= 1e-6 && g.max_rel_terminal <= 1e-6,
                   format("consumption=%.3e terminal=%.3e levels=%d", g.max_rel_consumption, g.max_rel_terminal,
                          g.levels)});
  }
  {
    const SelfFinancingStudy s = self_financing_study(policy, {252}, o.self_financing_paths, o.seed + 3);
    out.push_back({"self_financing", s.mean_error[0] < 5e-3,
                   format("dt=1/252 mean_max_error=%.4e worst_path=%.4e paths=%d", s.mean_error[0],
                          s.worst_error[0], s.paths)});
  }
  return out;
}

}  // namespace lifecycle
