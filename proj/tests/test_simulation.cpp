#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/simulation.hpp"
#include "lifecycle/validation.hpp"

using namespace lifecycle;
using namespace fixtures;

namespace {

constexpr double kV0 = 250000.0;

struct Stat {
  double mean;
  double se;
};

Stat stat(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

const MergedPolicy& full_policy() {
  static const Problem p = case_problem();
  static const MergedPolicy pol = solve_split(p, kV0);
  return pol;
}

}  // namespace

TEST_SUITE("simulation") {
  TEST_CASE("expected curves at the endpoints") {
    const MergedPolicy& pol = full_policy();
    const Problem& p = pol.problem();
    CHECK(expected_consumption(pol, 0.0) == doctest::Approx(policy_at(pol, 0.0, 1.0).c_star).epsilon(1e-14));
    CHECK(expected_wealth(pol, 0.0) == doctest::Approx(kV0).epsilon(1e-8));
    const double b = p.prefs.b_hat;
    const double eta = 1.0 / (b - 1.0);
    const double k_hat = b * (p.market.r() - 0.5 * eta * p.market.gamma_sq());
    const double expected_T = (pol.v2_star() - floor_F2(p, 0.0)) * std::exp(k_hat * eta * 40.0) *
                                  kernel_power_moment(p.market, eta, 40.0) +
                              p.cashflows.F;
    CHECK(expected_wealth(pol, 40.0) == doctest::Approx(expected_T).epsilon(1e-12));
  }

  TEST_CASE("closed-form expectations agree with Monte Carlo") {
    const MergedPolicy& pol = full_policy();
    const auto paths = simulate_policy(pol, 160, 4000, 2024);
    for (int k : {40, 80, 120}) {
      const double t = paths[0].t[k];
      std::vector<double> c, v, x;
      for (const auto& r : paths) {
        c.push_back(r.c_star[k]);
        v.push_back(r.V_star[k]);
        x.push_back(r.exposure(0, k));
      }
      const Stat sc = stat(c), sv = stat(v), sx = stat(x);
      CHECK(std::abs(sc.mean - expected_consumption(pol, t)) < 3.0 * sc.se);
      CHECK(std::abs(sv.mean - expected_wealth(pol, t)) < 3.0 * sv.se);
      CHECK(std::abs(sx.mean - expected_exposure(pol, t)[0]) < 3.0 * sx.se);
      // Ratio of means with a delta-method standard error.
      const double ratio = sx.mean / sv.mean;
      std::vector<double> resid;
      for (std::size_t i = 0; i < x.size(); ++i) resid.push_back(x[i] - ratio * v[i]);
      const double se = stat(resid).se / std::abs(sv.mean);
      CHECK(std::abs(ratio - expected_allocation_estimator(pol, t)[0]) < 3.0 * se);
    }
  }

  TEST_CASE("discounted wealth plus net consumption is a martingale") {
    const MergedPolicy& pol = full_policy();
    const auto paths = simulate_policy(pol, 160, 4000, 77);
    const double dt = 40.0 / 160;
    for (int k : {0, 40, 100, 160}) {
      std::vector<double> m;
      for (const auto& r : paths) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
          const double a = r.z[j] * (r.c_star[j] - r.income[j]);
          const double b = r.z[j + 1] * (r.c_star[j + 1] - r.income[j + 1]);
          acc += 0.5 * (a + b) * dt;
        }
        m.push_back(r.z[k] * r.V_star[k] + acc);
      }
      const Stat s = stat(m);
      CHECK(std::abs(s.mean - kV0) < 3.0 * s.se + 1e-9 * kV0);
    }
  }

  TEST_CASE("exposure estimator without floors is the constant mix") {
    const Problem p = no_floor_problem();
    const MergedPolicy pol = solve_split(p, kV0);
    const double expected = p.market.tangency()[0] / (1.0 - p.prefs.b_hat);
    for (double t : {0.0, 10.0, 25.0, 40.0})
      CHECK(expected_allocation_estimator(pol, t)[0] == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("expected exposure is positive") {
    const MergedPolicy& pol = full_policy();
    for (int k = 0; k <= 40; ++k) CHECK(expected_exposure(pol, k)[0] > 0.0);
  }

  TEST_CASE("fitted model has a hump in consumption and a falling allocation") {
    const MergedPolicy& pol = full_policy();
    const auto curves = expected_curves(pol, uniform_grid(40.0, 2080));
    const auto& c = curves.c_star;
    std::size_t peaks = 0, arg = 0;
    for (std::size_t k = 1; k + 1 < c.size(); ++k)
      if (c[k] > c[k - 1] && c[k] >= c[k + 1]) {
        ++peaks;
        arg = k;
      }
    CHECK(peaks == 1);
    CHECK(arg > 0);
    CHECK(arg + 1 < c.size());
    CHECK(c[arg] > c.front());
    CHECK(c[arg] > c.back());
  }

  TEST_CASE("initial allocation estimate sits within the fit residual of 75%") {
    const MergedPolicy& pol = full_policy();
    const auto target = target_curves_paper();
    const Eigen::VectorXd r = residuals(ModelVariant::Full, published_params(ModelVariant::Full), target, case_setup());
    const double bound = r.tail(r.size() / 2).cwiseAbs().maxCoeff();
    const double est = expected_allocation_estimator(pol, 0.0)[0];
    CHECK(std::abs(est - 0.75) / 0.75 <= bound * (1.0 + 1e-12));
    CHECK(std::abs(r[2080] - (est - 0.75) / 0.75) < 1e-12);
  }

  TEST_CASE("paths are reproducible and respect both floors") {
    const MergedPolicy& pol = full_policy();
    const Problem& p = pol.problem();
    const auto a = simulate_policy(pol, 208, 200, 5);
    const auto b = simulate_policy(pol, 208, 200, 5);
    CHECK(a[17].V_star == b[17].V_star);
    CHECK(a[199].c_star == b[199].c_star);
    for (const auto& r : a)
      for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(r.V_star[k] > r.F_t[k]);
        CHECK(r.c_star[k] > (*p.cashflows.cbar)(r.t[k]));
      }
  }

  TEST_CASE("replaying simulated prices reproduces the path") {
    const MergedPolicy& pol = full_policy();
    const auto paths = simulate_policy(pol, 520, 3, 8);
    for (const auto& r : paths) {
      const std::vector<double> price(r.prices.row(0).data(), r.prices.row(0).data() + r.size());
      const PathRecord back = replay_scenario(pol, r.t, price);
      for (std::size_t k = 0; k < r.size(); k += 13) {
        CHECK(back.V_star[k] == doctest::Approx(r.V_star[k]).epsilon(1e-9));
        CHECK(back.c_star[k] == doctest::Approx(r.c_star[k]).epsilon(1e-9));
        CHECK(back.pi(0, k) == doctest::Approx(r.pi(0, k)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("replay along deterministic price paths") {
    const MergedPolicy& pol = full_policy();
    const auto grid = uniform_grid(40.0, 2080);
    std::vector<double> up, down;
    for (double t : grid) {
      up.push_back(100.0 * std::exp(0.05 * t));
      down.push_back(100.0 * std::exp(-0.05 * t));
    }
    const PathRecord a = replay_scenario(pol, grid, up);
    CHECK(a.prices(0, 2080) == doctest::Approx(100.0 * std::exp(2.0)).epsilon(1e-12));
    const PathRecord d = replay_scenario(pol, grid, down);
    double worst = 1e300;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double t = grid[k];
      worst = std::min(worst, d.c_star[k] - (-25.0 * (t - 26.0) * (t - 26.0) + 37732.0));
      CHECK(d.V_star[k] > d.F_t[k]);
    }
    CHECK(worst < 0.0);
  }

  TEST_CASE("replay input errors") {
    const MergedPolicy& pol = full_policy();
    const auto code = [&](std::vector<double> t, std::vector<double> p) {
      try {
        replay_scenario(pol, t, p);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::InternalConsistency;
    };
    CHECK(code({0.0, 1.0}, {100.0, -1.0}) == ErrorCode::NonPositivePrice);
    CHECK(code({0.0, 1.0}, {90.0, 100.0}) == ErrorCode::ScenarioParse);
    CHECK(code({0.0, 0.0}, {100.0, 100.0}) == ErrorCode::ScenarioParse);

    MarketParams two;
    two.r = 0.01;
    two.mu = Eigen::Vector2d(0.05, 0.06);
    two.sigma = (Eigen::Matrix2d() << 0.2, 0.0, 0.0, 0.3).finished();
    two.p0 = Eigen::Vector2d(100.0, 100.0);
    const Problem& base = pol.problem();
    const Problem q(Market::validate(two), base.prefs, base.cashflows);
    const MergedPolicy pq = solve_split(q, kV0);
    try {
      replay_scenario(pq, {0.0, 1.0}, {100.0, 101.0});
      FAIL("expected MultiAssetUnsupported");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MultiAssetUnsupported);
    }
  }

  TEST_CASE("Euler replication converges as the step shrinks") {
    const MergedPolicy& pol = full_policy();
    const auto st = self_financing_study(pol, {52, 252, 1008}, 8, 31);
    CHECK(st.mean_error[0] > st.mean_error[1]);
    CHECK(st.mean_error[1] > st.mean_error[2]);

    // Low-volatility market: the error goes to zero with the step.
    const Problem& base = pol.problem();
    const Problem calm(Market::validate(market_params(0.005, 0.0052, 0.002)), base.prefs, base.cashflows);
    const MergedPolicy pc = solve_split(calm, kV0);
    const auto sc = self_financing_study(pc, {52, 252, 1008}, 2, 32);
    CHECK(sc.mean_error[2] < sc.mean_error[1]);
    CHECK(sc.mean_error[1] < sc.mean_error[0]);
    CHECK(sc.mean_error[2] < 0.2 * sc.mean_error[0]);
  }

  TEST_CASE("parallel expected curves match the serial reference") {
    const MergedPolicy& pol = full_policy();
    const auto grid = uniform_grid(40.0, 80);
    const auto a = expected_curves(pol, grid);
    const auto b = reference::expected_curves(pol, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(a.c_star[k] == doctest::Approx(b.c_star[k]).epsilon(1e-12));
      CHECK(a.V_star[k] == doctest::Approx(b.V_star[k]).epsilon(1e-12));
      CHECK(a.exposure(0, k) == doctest::Approx(b.exposure(0, k)).epsilon(1e-12));
      CHECK(a.estimator(0, k) == doctest::Approx(b.estimator(0, k)).epsilon(1e-12));
    }
  }

  TEST_CASE("slice tables match pointwise policy evaluation") {
    const MergedPolicy& pol = full_policy();
    const Problem& p = pol.problem();
    const auto path = simulate_kernel_path(p.market, 40.0, 208, 3, 0);
    const PathRecord a = record_path(pol, PolicySlices(pol, path.t), path);
    const PathRecord b = reference::record_path(pol, path);
    for (std::size_t k = 0; k < path.t.size(); ++k) {
      CHECK(a.V_star[k] == doctest::Approx(b.V_star[k]).epsilon(1e-12));
      CHECK(a.c_star[k] == doctest::Approx(b.c_star[k]).epsilon(1e-12));
      CHECK(a.exposure(0, k) == doctest::Approx(b.exposure(0, k)).epsilon(1e-12));
      CHECK(a.V1[k] == doctest::Approx(b.V1[k]).epsilon(1e-10));
    }
  }

  TEST_CASE("parallel budget and floor scans match the serial reference") {
    const MergedPolicy& pol = full_policy();
    const auto a = budget_check(pol, 208, 500, 9);
    const auto b = reference::budget_check(pol, 208, 500, 9);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
    CHECK(a.std_error == doctest::Approx(b.std_error).epsilon(1e-9));
    CHECK(a.target == doctest::Approx(b.target).epsilon(1e-12));
    const auto fa = floor_scan(pol, 104, 200, 10);
    const auto fb = reference::floor_scan(pol, 104, 200, 10);
    CHECK(fa.wealth_violations == fb.wealth_violations);
    CHECK(fa.consumption_violations == fb.consumption_violations);
    CHECK(fa.min_wealth_cushion == doctest::Approx(fb.min_wealth_cushion).epsilon(1e-10));
    CHECK(fa.min_consumption_cushion == doctest::Approx(fb.min_consumption_cushion).epsilon(1e-10));
  }

  TEST_CASE("a wrong consumption multiplier breaks the budget") {
    const MergedPolicy& pol = full_policy();
    const auto good = budget_check(pol, 520, 4000, 12);
    const auto bad = budget_check(perturb_multiplier(pol, 10.0), 520, 4000, 12);
    CHECK(std::abs(good.z_score()) <= 3.0);
    CHECK(std::abs(bad.z_score()) > 3.0);
  }

  TEST_CASE("streamed summary matches the in-memory quantiles") {
    const MergedPolicy& pol = full_policy();
    const std::vector<double> probs{0.1, 0.5, 0.9};
    const auto paths = simulate_policy(pol, 52, 700, 4);
    const auto q = summarize_paths(paths, probs);
    const auto s = simulate_summary(pol, 52, 700, 4, probs, 2);
    CHECK(s.stride == 1);
    CHECK(s.floor_violations == 0);
    CHECK(s.kept.size() == 2);
    CHECK(s.kept[1].V_star == paths[1].V_star);
    CHECK((s.quantiles.V_star - q.V_star).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.quantiles.pi1 - q.pi1).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("path CSV layout") {
    const MergedPolicy& pol = full_policy();
    const auto paths = simulate_policy(pol, 4, 1, 1);
    std::ostringstream os;
    write_path_csv(os, paths[0]);
    std::string header;
    std::getline(std::istringstream(os.str()) >> std::ws, header);
    CHECK(header == "t,z,P,c_star,pi_1,exposure_1,V_star,V1,V2,F_t");
  }
}
