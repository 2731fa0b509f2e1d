#include "lifecycle/merge.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lifecycle/errors.hpp"

namespace lifecycle {

namespace detail {

double log_chi(double b, double log_a, double s, double beta, double log_a_hat, double b_hat, double r,
               double gamma_sq, double T) {
  const double eta = 1.0 / (b - 1.0);
  const double k = b * (r - 0.5 * eta * gamma_sq);
  const double k_hat = b_hat * (r - 0.5 / (b_hat - 1.0) * gamma_sq);
  return std::log1p(-b) + (1.0 - b_hat) * eta * std::log1p(-b_hat) + eta * (log_a_hat - log_a) +
         eta * ((beta - k) * s - (beta - k_hat) * T);
}

double solve_split_equation(std::span<const double> w, std::span<const double> log_chi,
                            std::span<const double> expo, double v0, double F10, double F20,
                            const RootSpec& spec, int* nonmonotone) {
  const double room = v0 - F10 - F20;
  if (!(room > 0.0))
    throw Error(ErrorCode::InfeasibleEndowment,
                "v0=" + std::to_string(v0) + " must exceed F(0)=" + std::to_string(F10 + F20));
  std::vector<std::pair<double, double>> trace;
  const auto f = [&](double x) {
    const double log_rest = std::log(v0 - x - F20);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * std::exp(log_chi[i] + expo[i] * log_rest);
    const double val = x - acc - F10;
    if (nonmonotone) trace.emplace_back(x, val);
    return val;
  };
  const double eps = 1e-9 * room;
  const double x = find_root(f, F10 + eps, v0 - F20 - eps, spec);
  if (nonmonotone) {
    std::sort(trace.begin(), trace.end());
    int bad = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (trace[i].second < trace[i - 1].second) ++bad;
    *nonmonotone = bad;
  }
  return x;
}

}  // namespace detail

double chi(const Problem& p, double t) {
  const auto& pr = p.prefs;
  return std::exp(detail::log_chi((*pr.b)(t), std::log((*pr.a)(t)), t, pr.beta, std::log(pr.a_hat), pr.b_hat,
                                  p.market.r(), p.market.gamma_sq(), p.horizon()));
}

MergedPolicy solve_split(const Problem& p, double v0, const SplitOptions& options) {
  const double F10 = floor_F1(p, 0.0);
  const double F20 = floor_F2(p, 0.0);
  if (!(v0 > F10 + F20))
    throw Error(ErrorCode::InfeasibleEndowment,
                "v0=" + std::to_string(v0) + " must exceed F(0)=" + std::to_string(F10 + F20));

  const std::size_t n = p.rule.size();
  std::vector<double> s(n), w(n), lc(n), ex(n);
  p.rule.map(0.0, p.horizon(), s, w);
  const auto& pr = p.prefs;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = (*pr.b)(s[i]);
    lc[i] = detail::log_chi(b, std::log((*pr.a)(s[i])), s[i], pr.beta, std::log(pr.a_hat), pr.b_hat, p.market.r(),
                            p.market.gamma_sq(), p.horizon());
    ex[i] = (pr.b_hat - 1.0) / (b - 1.0);
  }
  int nonmono = 0;
  const double v1 = detail::solve_split_equation(w, lc, ex, v0, F10, F20, p.root, &nonmono);
  const double v2 = v0 - v1;
  const double lambda = solve_lambda2(p, v2);

  if (options.verify_multiplier) {
    const double check = solve_lambda1(p, v1);
    if (std::abs(check - lambda) > options.multiplier_tolerance * lambda)
      throw Error(ErrorCode::InternalConsistency, "lambda1(v1*)=" + std::to_string(check) +
                                                      " disagrees with lambda2(v2*)=" + std::to_string(lambda));
  }
  MergedPolicy out(v0, v1, lambda, ConsumptionSolution(p, v1, lambda), TerminalSolution(p, v2));
  out.nonmonotone_split_evals = nonmono;
  return out;
}

PolicyState policy_at(const MergedPolicy& policy, double t, double z, bool with_t_tilde) {
  const auto& c = policy.consumption();
  const auto& w = policy.terminal();
  const auto& p = policy.problem();
  PolicyState st;
  st.t = t;
  st.z = z;
  st.c_star = c.consumption_rate(t, z);
  st.V1 = c.wealth_V1(t, z);
  st.V2 = w.wealth_V2(t, z);
  st.V_star = st.V1 + st.V2;
  st.F1_t = floor_F1(p, t);
  st.F2_t = floor_F2(p, t);
  st.F_t = st.F1_t + st.F2_t;

  const auto pi1 = c.policy_pi1(t, z);
  const auto pi2 = w.policy_pi2(t, z);
  st.exposure = pi1.exposure + pi2.exposure;
  st.multiple_consumption = t < p.horizon() ? pi1.multiple : 1.0 / (1.0 - (*p.prefs.b)(t));
  st.multiple_terminal = pi2.multiple;
  const double scale = std::max({std::abs(st.V1), std::abs(st.V2), 1.0});
  st.zero_wealth = std::abs(st.V_star) <= kZeroWealthTolerance * scale;
  st.pi_star = st.zero_wealth ? Eigen::VectorXd::Zero(st.exposure.size()) : Eigen::VectorXd(st.exposure / st.V_star);
  st.t_tilde = with_t_tilde && t < p.horizon() ? c.t_tilde(t, z) : p.horizon();
  return st;
}

PolicyState policy_constant_b(const Problem& p, double v0, double t, double z) {
  const auto& pr = p.prefs;
  const double T = p.horizon();
  for (int k = 0; k <= 2080; ++k) {
    const double s = T * k / 2080.0;
    if (std::abs((*pr.b)(s) - pr.b_hat) > 1e-12 * std::max(1.0, std::abs(pr.b_hat)))
      throw Error(ErrorCode::NotConstantB, "b(t) differs from b_hat at t=" + std::to_string(s));
  }
  const double F0 = floor_F(p, 0.0);
  if (!(v0 > F0))
    throw Error(ErrorCode::InfeasibleEndowment,
                "v0=" + std::to_string(v0) + " must exceed F(0)=" + std::to_string(F0));

  const auto chi_fn = [&](double s) { return chi(p, s); };
  const double I0 = p.rule.integrate(chi_fn, 0.0, T);
  const double It = p.rule.integrate(chi_fn, t, T);
  const double bh = pr.b_hat;
  const double kappa = bh / (bh - 1.0) * (p.market.r() - 0.5 / (bh - 1.0) * p.market.gamma_sq());
  const double growth = std::exp(kappa * t + std::log(z) / (bh - 1.0));

  PolicyState st;
  st.t = t;
  st.z = z;
  st.F1_t = floor_F1(p, t);
  st.F2_t = floor_F2(p, t);
  st.F_t = st.F1_t + st.F2_t;
  const double cushion = (v0 - F0) * growth * (It + 1.0) / (I0 + 1.0);
  st.V_star = cushion + st.F_t;
  st.V2 = (v0 - F0) / (I0 + 1.0) * growth + st.F2_t;
  st.V1 = st.V_star - st.V2;
  const double zeta = chi(p, t) / (It + 1.0);
  st.c_star = zeta * cushion + (*p.cashflows.cbar)(t);
  st.multiple_consumption = st.multiple_terminal = 1.0 / (1.0 - bh);
  st.exposure = st.multiple_terminal * cushion * p.market.tangency();
  st.zero_wealth = std::abs(st.V_star) <= kZeroWealthTolerance * std::max(std::abs(st.F_t), 1.0);
  st.pi_star = st.zero_wealth ? Eigen::VectorXd::Zero(st.exposure.size()) : Eigen::VectorXd(st.exposure / st.V_star);
  st.t_tilde = 0.5 * (t + T);
  return st;
}

PolicyDecomposition decompose_policy(const MergedPolicy& policy, double t, double z) {
  const auto st = policy_at(policy, t, z, false);
  if (st.zero_wealth || std::abs(st.V1) == 0.0 || std::abs(st.V2) == 0.0)
    throw Error(ErrorCode::ZeroWealth, "decomposition needs nonzero V*, V1 and V2");
  const auto& dir = policy.problem().market.tangency();
  const double bh = policy.problem().prefs.b_hat;
  const double m1 = st.multiple_consumption;
  const double m2 = 1.0 / (1.0 - bh);

  PolicyDecomposition d;
  d.b_tilde = 1.0 - 1.0 / m1;
  d.correction_coefficient = (bh - d.b_tilde) / ((1.0 - bh) * (1.0 - d.b_tilde));
  const double cushion_total = (st.V_star - st.F_t) / st.V_star;

  d.ppi_pair.base = m1 * cushion_total * dir;
  d.ppi_pair.correction = d.correction_coefficient * (st.V2 - st.F2_t) / st.V_star * dir;
  d.ppi_pair.total = d.ppi_pair.base + d.ppi_pair.correction;

  d.cppi_plus_ppi.base = m2 * cushion_total * dir;
  d.cppi_plus_ppi.correction = -d.correction_coefficient * (st.V1 - st.F1_t) / st.V_star * dir;
  d.cppi_plus_ppi.total = d.cppi_plus_ppi.base + d.cppi_plus_ppi.correction;
  return d;
}

}  // namespace lifecycle
