#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/market.hpp"

using namespace lifecycle;
using fixtures::market_params;

namespace {

ErrorCode code_of(const MarketParams& p) {
  try {
    Market::validate(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments sample(int n, F&& draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw(i);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) / (n - 1))};
}

}  // namespace

TEST_SUITE("market_model") {
  TEST_CASE("single asset market price of risk") {
    const Market m = Market::validate(market_params());
    CHECK(m.gamma()[0] == doctest::Approx(0.225).epsilon(1e-14));
    CHECK(m.gamma_sq() == doctest::Approx(0.050625).epsilon(1e-14));
    CHECK(m.tangency()[0] == doctest::Approx(0.045 / 0.04).epsilon(1e-14));
  }

  TEST_CASE("drift at the risk-free rate is rejected") {
    CHECK(code_of(market_params(0.005, 0.005, 0.2)) == ErrorCode::DriftBelowRiskFree);
  }

  TEST_CASE("singular two-asset volatility is rejected") {
    MarketParams p;
    p.r = 0.01;
    p.mu = Eigen::Vector2d(0.05, 0.06);
    p.sigma = (Eigen::Matrix2d() << 0.2, 0.1, 0.4, 0.2).finished();
    p.p0 = Eigen::Vector2d(100.0, 100.0);
    CHECK(code_of(p) == ErrorCode::NonPositiveDefinite);
  }

  TEST_CASE("mismatched dimensions are rejected") {
    MarketParams p = market_params();
    p.p0 = Eigen::Vector2d(1.0, 1.0);
    CHECK(code_of(p) == ErrorCode::BadDimension);
  }

  TEST_CASE("two-asset tangency solves sigma sigma' x = mu - r") {
    MarketParams p;
    p.r = 0.01;
    p.mu = Eigen::Vector2d(0.05, 0.07);
    p.sigma = (Eigen::Matrix2d() << 0.2, 0.0, 0.05, 0.25).finished();
    p.p0 = Eigen::Vector2d(100.0, 50.0);
    const Market m = Market::validate(p);
    const Eigen::VectorXd back = m.covariance() * m.tangency();
    CHECK(back[0] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(back[1] == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(m.gamma_sq() == doctest::Approx(m.gamma().squaredNorm()));
  }

  TEST_CASE("kernel value") {
    const Market m = Market::validate(market_params());
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    CHECK(kernel_value(m, 0.0, zero) == 1.0);
    CHECK(kernel_value(m, 1.0, zero) == doctest::Approx(std::exp(-0.0303125)).epsilon(1e-14));
    for (double w : {-30.0, -1.0, 0.5, 40.0}) CHECK(kernel_value(m, 10.0, Eigen::VectorXd::Constant(1, w)) > 0.0);
  }

  TEST_CASE("kernel power moments") {
    const Market m = Market::validate(market_params());
    CHECK(kernel_power_moment(m, 1.0, 10.0) == doctest::Approx(std::exp(-0.05)).epsilon(1e-14));
    CHECK(kernel_power_moment(m, 0.0, 7.0) == 1.0);
    CHECK(kernel_power_moment(m, -1.0, 1.0) == doctest::Approx(std::exp(0.055625)).epsilon(1e-14));
    CHECK(kernel_power_moment(m, -1.0, 1.0) == doctest::Approx(1.05720).epsilon(1e-5));
  }

  TEST_CASE("power moment agrees with log-normal sampling") {
    const Market m = Market::validate(market_params());
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    const auto mc = sample(1000000, [&](int) {
      const double w = n(rng);
      return std::pow(kernel_value(m, 1.0, Eigen::VectorXd::Constant(1, w)), -1.0);
    });
    CHECK(std::abs(mc.mean - kernel_power_moment(m, -1.0, 1.0)) < 3.0 * mc.se);
  }

  TEST_CASE("simulated paths are reproducible per seed and path index") {
    const Market m = Market::validate(market_params());
    const auto a = simulate_kernel_path(m, 1.0, 1, 42, 0);
    const auto b = simulate_kernel_path(m, 1.0, 1, 42, 0);
    const auto c = simulate_kernel_path(m, 1.0, 1, 43, 0);
    CHECK(a.z[1] == b.z[1]);
    CHECK(a.z[1] != c.z[1]);
    const auto batch = simulate_kernel_paths(m, 1.0, 4, 3, 42);
    CHECK(batch[0].z == simulate_kernel_path(m, 1.0, 4, 42, 0).z);
    CHECK(batch[2].z == simulate_kernel_path(m, 1.0, 4, 42, 2).z);
  }

  TEST_CASE("simulated kernel is a discount factor on average") {
    const Market m = Market::validate(market_params());
    const auto paths = simulate_kernel_paths(m, 40.0, 40, 20000, 11);
    const auto mc = sample(20000, [&](int i) { return paths[i].z.back(); });
    CHECK(std::abs(mc.mean - std::exp(-0.2)) < 3.0 * mc.se);
  }

  TEST_CASE("path kernel matches the closed form in W") {
    const Market m = Market::validate(market_params());
    const auto path = simulate_kernel_path(m, 5.0, 50, 3, 0);
    for (std::size_t k = 0; k < path.t.size(); k += 7)
      CHECK(path.z[k] == doctest::Approx(kernel_value(m, path.t[k], path.w.col(static_cast<Eigen::Index>(k))))
                             .epsilon(1e-12));
  }

  TEST_CASE("stock prices") {
    const Market m = Market::validate(market_params());
    CHECK(stock_price(m, 0.0, Eigen::VectorXd::Zero(1))[0] == 100.0);
    CHECK(stock_price(m, 1.0, Eigen::VectorXd::Zero(1))[0] == doctest::Approx(100.0 * std::exp(0.03)).epsilon(1e-14));
    const auto paths = simulate_kernel_paths(m, 10.0, 10, 20000, 5);
    const auto mc = sample(20000, [&](int i) { return stock_price(m, 10.0, paths[i].w.col(10))[0]; });
    CHECK(std::abs(mc.mean - 100.0 * std::exp(0.5)) < 3.0 * mc.se);
  }
}
