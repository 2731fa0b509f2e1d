#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/preferences.hpp"

using namespace lifecycle;
using namespace fixtures;

TEST_SUITE("preferences") {
  TEST_CASE("scaled exponential integrates to the annual amount per year") {
    const ScaledExpCurve y(26200.0, 0.0207);
    for (int k : {0, 10, 39}) {
      const double got = integrate([&](double t) { return y(t); }, k, k + 1.0);
      CHECK(got == doctest::Approx(26200.0 * std::exp(0.0207 * k)).epsilon(1e-13));
    }
    CHECK(ScaledExpCurve(5.0, 0.0)(3.0) == 5.0);
  }

  TEST_CASE("table curve interpolates and holds its end values") {
    const TableCurve c({0.0, 1.0, 3.0}, {2.0, 4.0, 0.0});
    CHECK(c(-1.0) == 2.0);
    CHECK(c(0.5) == doctest::Approx(3.0));
    CHECK(c(2.0) == doctest::Approx(2.0));
    CHECK(c(10.0) == 0.0);
    CHECK_THROWS_AS(TableCurve({0.0, 0.0}, {1.0, 2.0}), Error);
  }

  TEST_CASE("consumption-floor present value vanishes when income matches the floor") {
    CashflowModel cf = case_cashflows();
    cf.cbar = cf.y;
    cf.F = 0.0;
    const Problem p(Market::validate(market_params()), prefs(0.03, 1.0, -1.0, make_constant(1.0), make_constant(-1.0)), cf);
    for (double t : {0.0, 13.0, 40.0}) {
      CHECK(floor_F1(p, t) == 0.0);
      CHECK(floor_F(p, t) == 0.0);
    }
  }

  TEST_CASE("floors of the case study") {
    const Problem p = case_problem();
    CHECK(floor_F1(p, 40.0) == 0.0);
    const double F10 = floor_F1(p, 0.0);
    CHECK(F10 < 0.0);
    const Problem fine(p.market, p.prefs, p.cashflows, QuadSpec{16, 160});
    CHECK(F10 == doctest::Approx(floor_F1(fine, 0.0)).epsilon(1e-12));
    CHECK(floor_F2(p, 40.0) == p.cashflows.F);
    CHECK(floor_F2(p, 0.0) == doctest::Approx(p.cashflows.F * std::exp(-0.2)).epsilon(1e-14));
    CHECK(floor_F2(p, 0.0) == doctest::Approx(356250.2).epsilon(1e-6));
    CHECK(floor_F(p, 40.0) == doctest::Approx(p.cashflows.F).epsilon(1e-14));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int i = 0; i < 20; ++i) {
      const double t = u(rng);
      CHECK(floor_F(p, t) == doctest::Approx(floor_F1(p, t) + floor_F2(p, t)).epsilon(1e-15));
    }
  }

  TEST_CASE("terminal floor is zero without a floor") {
    CashflowModel cf = case_cashflows();
    cf.F = 0.0;
    const Problem p(Market::validate(market_params()), prefs(0.03, 1.0, -1.0, make_constant(1.0), make_constant(-1.0)), cf);
    CHECK(floor_F2(p, 0.0) == 0.0);
    CHECK(floor_F2(p, 25.0) == 0.0);
  }

  TEST_CASE("annuity value of the terminal floor") {
    const double amount = 0.75 * last_year_income() / 2.0;
    CHECK(std::abs(terminal_F_from_annuity(0.005, 20.8, amount) - 435125.0) <= 1.0);
    CHECK(terminal_F_from_annuity(0.005, 0.0, amount) == 0.0);
    CHECK(terminal_F_from_annuity(0.0, 20.8, 100.0) == doctest::Approx(2080.0).epsilon(1e-15));
    CHECK(terminal_F_from_annuity(1e-14, 20.8, 100.0) == doctest::Approx(2080.0).epsilon(1e-12));
    CHECK(terminal_F_from_annuity(0.05, 10.0, 1.0) == doctest::Approx(-std::expm1(-0.5) / 0.05).epsilon(1e-15));
  }

  TEST_CASE("unit cushion terminal utility") {
    const Problem p = case_problem();
    const double b = p.prefs.b_hat;
    const double v = p.cashflows.F + (1.0 - b);
    CHECK(utility_terminal(p.prefs, p.cashflows, v) ==
          doctest::Approx(std::exp(-0.03 * 40.0) * (1.0 - b) / b).epsilon(1e-9));
  }

  TEST_CASE("utilities refuse values at or below the floors") {
    const Problem p = case_problem();
    const double cbar = (*p.cashflows.cbar)(5.0);
    CHECK_THROWS_AS(utility_consumption(p.prefs, p.cashflows, 5.0, cbar), Error);
    CHECK_THROWS_AS(utility_terminal(p.prefs, p.cashflows, p.cashflows.F - 1.0), Error);
    CHECK_THROWS_AS(arrow_pratt(p.prefs, p.cashflows, 5.0, cbar - 1.0, p.cashflows.F + 1.0), Error);
  }

  TEST_CASE("Arrow-Pratt coefficients") {
    const Problem p = case_problem();
    const double F = p.cashflows.F;
    for (double t : {0.0, 12.5, 39.0}) {
      const double cbar = (*p.cashflows.cbar)(t);
      const double bt = (*p.prefs.b)(t);
      for (double cushion : {10.0, 3000.0, 25000.0}) {
        const auto ap = arrow_pratt(p.prefs, p.cashflows, t, cbar + cushion, F + 1.0);
        CHECK(ap.consumption * cushion == doctest::Approx(1.0 - bt).epsilon(1e-14));
        CHECK(ap.terminal == doctest::Approx(1.0 - p.prefs.b_hat).epsilon(1e-14));

        const double c = cbar + cushion;
        const double h = 1e-3 * cushion;
        const auto U = [&](double x) { return utility_consumption(p.prefs, p.cashflows, t, x); };
        const double d1 = (U(c + h) - U(c - h)) / (2.0 * h);
        const double d2 = (U(c + h) - 2.0 * U(c) + U(c - h)) / (h * h);
        CHECK(-d2 / d1 == doctest::Approx(ap.consumption).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("preference validation") {
    const auto check_bad = [](CurvePtr b, double b_hat = -1.0) {
      try {
        prefs(0.03, 1.0, b_hat, make_constant(1.0), std::move(b)).validate(40.0);
        FAIL("expected InvalidPreferences");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidPreferences);
      }
    };
    check_bad(make_constant(0.0));
    check_bad(make_constant(1.0));
    check_bad(make_exp(0.5, 0.05));                                              // crosses 1 before T
    check_bad(std::make_shared<TableCurve>(std::vector{0.0, 40.0}, std::vector{-1.0, 0.5}));  // sign change
    check_bad(make_constant(-1.0), 0.0);
    check_bad(make_constant(-1.0), 1.0);
    CHECK_NOTHROW(prefs(0.03, 1.0, -1.0, make_constant(1.0), make_exp(-4.9731, -0.034)).validate(40.0));
    CHECK_NOTHROW(prefs(0.03, 1.0, 0.5, make_constant(1.0), make_constant(0.3)).validate(40.0));
  }
}
