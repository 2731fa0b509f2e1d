#pragma once

#include <cmath>
#include <random>

#include "lifecycle/calibration.hpp"
#include "lifecycle/merge.hpp"

namespace fixtures {

using namespace lifecycle;

inline MarketParams market_params(double r = 0.005, double mu = 0.05, double sigma = 0.2) {
  MarketParams m;
  m.r = r;
  m.mu = Eigen::VectorXd::Constant(1, mu);
  m.sigma = Eigen::MatrixXd::Constant(1, 1, sigma);
  m.p0 = Eigen::VectorXd::Constant(1, 100.0);
  return m;
}

inline double last_year_income() { return 26200.0 * std::exp(39 * 0.0207); }

inline CashflowModel case_cashflows() {
  CashflowModel cf;
  cf.y = make_scaled_exp(26200.0, 0.0207);
  cf.cbar = make_scaled_exp(14880.0, 0.0193);
  cf.F = terminal_F_from_annuity(0.005, 20.8, 0.75 * last_year_income() / 2.0);
  cf.T = 40.0;
  return cf;
}

inline CalibrationSetup case_setup() {
  CalibrationSetup s;
  s.market = market_params();
  s.cashflows = case_cashflows();
  return s;
}

inline Problem case_problem(ModelVariant v = ModelVariant::Full) {
  return make_variant_problem(case_setup(), v, published_params(v));
}

inline PreferenceModel prefs(double beta, double a_hat, double b_hat, CurvePtr a, CurvePtr b) {
  PreferenceModel p;
  p.beta = beta;
  p.a_hat = a_hat;
  p.b_hat = b_hat;
  p.a = std::move(a);
  p.b = std::move(b);
  return p;
}

/// r = 0, no market price of risk, beta = 0: every discount factor collapses to 1.
inline Problem flat_problem(double b, CurvePtr a = make_constant(1.0), double a_hat = 1.0, double F = 0.0) {
  CashflowModel cf;
  cf.y = make_constant(0.0);
  cf.cbar = make_constant(0.0);
  cf.F = F;
  cf.T = 10.0;
  return Problem(Market::assume_valid(market_params(0.0, 0.0, 0.2)), prefs(0.0, a_hat, b, std::move(a), make_constant(b)),
                 cf);
}

/// Income equals the consumption floor and there is no terminal floor.
inline Problem no_floor_problem(double b_hat = -0.8247, double a0 = 0.3425e7) {
  CashflowModel cf = case_cashflows();
  cf.cbar = cf.y;
  cf.F = 0.0;
  return Problem(Market::validate(market_params()), prefs(0.03, 1.0, b_hat, make_constant(a0), make_constant(b_hat)), cf);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Log-kernel draw at time t under the real-world measure.
inline double draw_log_z(std::mt19937_64& rng, const Market& m, double t) {
  std::normal_distribution<double> n;
  return -(m.r() + 0.5 * m.gamma_sq()) * t + std::sqrt(m.gamma_sq() * t) * n(rng);
}

}  // namespace fixtures
