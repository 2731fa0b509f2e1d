#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/terminal.hpp"

using namespace lifecycle;
using namespace fixtures;

namespace {

double k_hat(const Problem& p) {
  const double b = p.prefs.b_hat;
  return b * (p.market.r() - 0.5 / (b - 1.0) * p.market.gamma_sq());
}

}  // namespace

TEST_SUITE("wealth_solver") {
  TEST_CASE("unit cushion with a unit prefactor") {
    // beta = k_hat makes the exponential prefactor one; a positive b_hat keeps beta nonnegative.
    const Problem base = case_problem();
    PreferenceModel pr = base.prefs;
    pr.b_hat = 0.5;
    pr.beta = k_hat(Problem(base.market, pr, base.cashflows));
    CashflowModel cf = base.cashflows;
    const Problem p(base.market, pr, cf);
    const double b = p.prefs.b_hat;
    CHECK(solve_lambda2(p, floor_F2(p, 0.0) + 1.0) == doctest::Approx(std::pow(1.0 - b, 1.0 - b)).epsilon(1e-9));
  }

  TEST_CASE("multiplier falls as the budget grows and matches the value derivative") {
    const Problem p = case_problem();
    const double F20 = floor_F2(p, 0.0);
    double prev = solve_lambda2(p, F20 + 100.0);
    for (double cushion : {1e3, 1e4, 1e5, 1e6}) {
      const double v2 = F20 + cushion;
      const double l = solve_lambda2(p, v2);
      CHECK(l < prev);
      prev = l;
      const auto d = value_V2(p, v2);
      CHECK(d.first == l);
      CHECK(d.second < 0.0);
      const double h = 1e-4 * cushion;
      CHECK((value_V2(p, v2 + h).value - value_V2(p, v2 - h).value) / (2.0 * h) == doctest::Approx(l).epsilon(1e-6));
      CHECK((solve_lambda2(p, v2 + h) - solve_lambda2(p, v2 - h)) / (2.0 * h) ==
            doctest::Approx(d.second).epsilon(1e-6));
    }
  }

  TEST_CASE("budget at the discounted floor is infeasible") {
    const Problem p = case_problem();
    try {
      solve_lambda2(p, floor_F2(p, 0.0));
      FAIL("expected InfeasibleBudget");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleBudget);
    }
  }

  TEST_CASE("value near the floor scales like a power of the cushion") {
    const Problem p = case_problem();
    const double F20 = floor_F2(p, 0.0);
    const double e1 = 1e-2, e2 = 1.0;
    const double slope = std::log(value_V2(p, F20 + e2).value / value_V2(p, F20 + e1).value) / std::log(e2 / e1);
    CHECK(std::abs(slope - p.prefs.b_hat) < 1e-3);
  }

  TEST_CASE("wealth of the terminal problem") {
    const Problem p = case_problem();
    const double F20 = floor_F2(p, 0.0);
    const double v2 = F20 + 250000.0;
    const TerminalSolution sol(p, v2);
    CHECK(sol.wealth_V2(0.0, 1.0) == doctest::Approx(v2).epsilon(1e-14));
    const double b = p.prefs.b_hat;
    for (double z : {0.3, 1.0, 2.5}) {
      const double expected = (v2 - F20) * std::exp(k_hat(p) / (b - 1.0) * 40.0) * std::pow(z, 1.0 / (b - 1.0)) + p.cashflows.F;
      CHECK(sol.wealth_V2(40.0, z) == doctest::Approx(expected).epsilon(1e-13));
    }
    std::mt19937_64 rng(8);
    for (int i = 0; i < 30; ++i) {
      const double t = 40.0 * i / 30.0;
      const double z = std::exp(draw_log_z(rng, p.market, t));
      CHECK(sol.wealth_V2(t, z) > floor_F2(p, t));
    }
  }

  TEST_CASE("discounted terminal wealth is a martingale") {
    const Problem p = case_problem();
    const double v2 = floor_F2(p, 0.0) + 250000.0;
    const TerminalSolution sol(p, v2);
    const auto paths = simulate_kernel_paths(p.market, 40.0, 4, 40000, 99);
    for (int k = 1; k <= 4; ++k) {
      double s = 0.0, s2 = 0.0;
      for (const auto& path : paths) {
        const double x = path.z[k] * sol.wealth_V2(path.t[k], path.z[k]);
        s += x;
        s2 += x * x;
      }
      const double n = static_cast<double>(paths.size());
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
      CHECK(std::abs(mean - v2) < 3.0 * se);
    }
  }

  TEST_CASE("without a floor the weight is a constant mix") {
    CashflowModel cf = case_cashflows();
    cf.F = 0.0;
    const Problem base = case_problem();
    const Problem p(base.market, base.prefs, cf);
    const TerminalSolution sol(p, 100000.0);
    const double expected = p.market.tangency()[0] / (1.0 - p.prefs.b_hat);
    for (double t : {0.0, 17.0, 40.0})
      for (double z : {0.2, 1.0, 4.0}) CHECK(sol.policy_pi2(t, z).weight[0] == doctest::Approx(expected).epsilon(1e-13));
  }

  TEST_CASE("weight vanishes at the floor and is increasing and concave in wealth") {
    const Problem p = case_problem();
    const double F20 = floor_F2(p, 0.0);
    CHECK(TerminalSolution(p, F20 + 1e-6).policy_pi2(0.0, 1.0).weight[0] < 1e-10);
    const double m = 1.0 / (1.0 - p.prefs.b_hat) * p.market.tangency()[0];
    const double Ft = floor_F2(p, 10.0);
    const auto w = [&](double v) { return m * (v - Ft) / v; };
    for (double v : {Ft + 10.0, Ft + 1e4, Ft + 1e6}) {
      const double h = 1e-3 * (v - Ft);
      CHECK(w(v + h) > w(v));
      CHECK(w(v + h) - 2.0 * w(v) + w(v - h) < 0.0);
    }
    const TerminalSolution sol(p, F20 + 1e5);
    const auto pos = sol.policy_pi2(10.0, 1.3);
    CHECK(pos.weight[0] == doctest::Approx(w(sol.wealth_V2(10.0, 1.3))).epsilon(1e-12));
    CHECK(pos.exposure[0] > 0.0);
  }
}
