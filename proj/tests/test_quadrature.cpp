#include <doctest.h>

#include <cmath>

#include "lifecycle/errors.hpp"
#include "lifecycle/quadrature.hpp"

using namespace lifecycle;

TEST_SUITE("quadrature") {
  TEST_CASE("constant integrand gives the interval length") {
    CHECK(integrate([](double) { return 1.0; }, 0.0, 40.0) == doctest::Approx(40.0).epsilon(1e-14));
  }

  TEST_CASE("discount factor integrates to the annuity value") {
    const double r = 0.005;
    const double got = integrate([&](double t) { return std::exp(-r * t); }, 0.0, 40.0);
    CHECK(got == doctest::Approx(-std::expm1(-0.2) / r).epsilon(1e-14));
  }

  TEST_CASE("empty interval is zero and reversed limits are rejected") {
    CHECK(integrate([](double t) { return t; }, 3.0, 3.0) == 0.0);
    CHECK_THROWS_AS(integrate([](double t) { return t * t; }, 2.0, 0.0), Error);
  }

  TEST_CASE("non-finite integrand is reported") {
    CHECK_THROWS_AS(integrate([](double t) { return 1.0 / (t - t); }, 0.0, 1.0), Error);
    try {
      integrate([](double) { return std::nan(""); }, 0.0, 1.0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFinite);
    }
  }

  TEST_CASE("composite rule maps nodes inside the interval with weights summing to its length") {
    const CompositeRule rule(QuadSpec{8, 4});
    std::vector<double> s(rule.size()), w(rule.size());
    rule.map(2.0, 5.0, s, w);
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i] > 2.0);
      CHECK(s[i] < 5.0);
      total += w[i];
    }
    CHECK(total == doctest::Approx(3.0).epsilon(1e-14));
  }

  TEST_CASE("invalid layouts are rejected") {
    CHECK_THROWS_AS(QuadSpec({0, 4}).validate(), Error);
    CHECK_THROWS_AS(RootSpec({-1.0, 1e-10, 10}).validate(), Error);
  }

  TEST_CASE("bracketed roots") {
    CHECK(find_root([](double x) { return x - 1.0; }, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(find_root([](double x) { return x * x * x - 2.0; }, 1.0, 2.0) - std::cbrt(2.0)) < 1e-10);
  }

  TEST_CASE("missing sign change is NoBracket") {
    try {
      find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0);
      FAIL("expected NoBracket");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoBracket);
    }
  }

  TEST_CASE("iteration cap is MaxIterations") {
    RootSpec tight{0.0, 0.0, 3};
    try {
      find_root([](double x) { return std::sin(x); }, 3.0, 3.5, tight);
      FAIL("expected MaxIterations");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MaxIterations);
    }
  }

  TEST_CASE("log-space search expands the bracket from one for decreasing functions") {
    // 5 * lambda^{-1/2} - 1 = 0 at lambda = 25, and far out in either direction.
    for (double target : {25.0, 1e-40, 1e60}) {
      const double k = std::sqrt(target);
      const double lambda = find_root_log_decreasing([&](double l) { return k / std::sqrt(l) - 1.0; });
      CHECK(lambda == doctest::Approx(target).epsilon(1e-10));
    }
  }
}
