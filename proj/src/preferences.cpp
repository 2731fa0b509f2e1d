#include "lifecycle/preferences.hpp"

#include <cmath>
#include <string>

#include "lifecycle/errors.hpp"

namespace lifecycle {

namespace {
constexpr int kPreferenceGrid = 2081;
}

void PreferenceModel::validate(double horizon) const {
  if (!a || !b) throw Error(ErrorCode::InvalidPreferences, "a(t) and b(t) curves are required");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidPreferences, "beta must be >= 0");
  if (!(a_hat > 0.0) || !std::isfinite(a_hat)) throw Error(ErrorCode::InvalidPreferences, "a_hat must be > 0");
  if (!(b_hat < 1.0) || b_hat == 0.0) throw Error(ErrorCode::InvalidPreferences, "b_hat must be < 1 and nonzero");

  const double b0 = (*b)(0.0);
  if (!(b0 < 1.0) || b0 == 0.0) throw Error(ErrorCode::InvalidPreferences, "b(0) must be < 1 and nonzero");
  for (int k = 0; k < kPreferenceGrid; ++k) {
    const double t = horizon * k / (kPreferenceGrid - 1);
    const double bt = (*b)(t);
    const double at = (*a)(t);
    if (!std::isfinite(bt) || !(bt < 1.0) || bt == 0.0 || (bt > 0.0) != (b0 > 0.0))
      throw Error(ErrorCode::InvalidPreferences, "b(t) leaves (-inf,1)\\{0} or changes sign at t=" + std::to_string(t));
    if (!std::isfinite(at) || !(at > 0.0))
      throw Error(ErrorCode::InvalidPreferences, "a(t) must be positive at t=" + std::to_string(t));
  }
}

void CashflowModel::validate() const {
  if (!y || !cbar) throw Error(ErrorCode::ConfigError, "income and floor curves are required");
  if (!(T > 0.0)) throw Error(ErrorCode::ConfigError, "horizon T must be positive");
  if (!(F >= 0.0)) throw Error(ErrorCode::ConfigError, "terminal floor F must be >= 0");
  for (int k = 0; k < kPreferenceGrid; ++k) {
    const double t = T * k / (kPreferenceGrid - 1);
    if (!((*y)(t) >= 0.0) || !((*cbar)(t) >= 0.0))
      throw Error(ErrorCode::ConfigError, "income and floor must be >= 0 at t=" + std::to_string(t));
  }
}

Problem::Problem(Market m, PreferenceModel p, CashflowModel c, QuadSpec q, RootSpec rs)
    : market(std::move(m)), prefs(std::move(p)), cashflows(std::move(c)), quad(q), root(rs), rule(q) {
  root.validate();
  cashflows.validate();
  prefs.validate(cashflows.T);
}

double floor_F1(const Problem& p, double t) {
  const double r = p.market.r();
  const auto& cf = p.cashflows;
  return p.rule.integrate([&](double s) { return std::exp(-r * (s - t)) * ((*cf.cbar)(s) - (*cf.y)(s)); }, t,
                          cf.T);
}

double floor_F2(const Problem& p, double t) {
  return std::exp(-p.market.r() * (p.cashflows.T - t)) * p.cashflows.F;
}

double floor_F(const Problem& p, double t) { return floor_F1(p, t) + floor_F2(p, t); }

double terminal_F_from_annuity(double rate, double years, double annual_amount) {
  const double x = rate * years;
  if (x == 0.0) return annual_amount * years;
  return annual_amount * years * (-std::expm1(-x) / x);
}

double utility_consumption(const PreferenceModel& prefs, const CashflowModel& cf, double t, double c) {
  const double cushion = c - (*cf.cbar)(t);
  if (!(cushion > 0.0)) throw Error(ErrorCode::FloorViolated, "consumption at or below the floor");
  const double b = (*prefs.b)(t);
  return std::exp(-prefs.beta * t) * (*prefs.a)(t) * (1.0 - b) / b * std::pow(cushion / (1.0 - b), b);
}

double utility_terminal(const PreferenceModel& prefs, const CashflowModel& cf, double v) {
  const double cushion = v - cf.F;
  if (!(cushion > 0.0)) throw Error(ErrorCode::FloorViolated, "terminal wealth at or below the floor");
  const double b = prefs.b_hat;
  return std::exp(-prefs.beta * cf.T) * prefs.a_hat * (1.0 - b) / b * std::pow(cushion / (1.0 - b), b);
}

ArrowPratt arrow_pratt(const PreferenceModel& prefs, const CashflowModel& cf, double t, double c, double v) {
  const double cc = c - (*cf.cbar)(t);
  const double vc = v - cf.F;
  if (!(cc > 0.0) || !(vc > 0.0)) throw Error(ErrorCode::FloorViolated, "Arrow-Pratt needs positive cushions");
  return {(1.0 - (*prefs.b)(t)) / cc, (1.0 - prefs.b_hat) / vc};
}

}  // namespace lifecycle
