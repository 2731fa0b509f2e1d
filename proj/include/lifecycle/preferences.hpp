#pragma once

#include "lifecycle/curves.hpp"
#include "lifecycle/market.hpp"
#include "lifecycle/quadrature.hpp"

namespace lifecycle {

/// HARA preference parameters. b(t) and b_hat must stay in (-inf,1) without touching zero.
struct PreferenceModel {
  double beta = 0.0;
  double a_hat = 1.0;
  double b_hat = -1.0;
  CurvePtr a;
  CurvePtr b;

  /// Samples a and b on a 2,081-point grid over [0,horizon].
  void validate(double horizon) const;
};

struct CashflowModel {
  CurvePtr y;
  CurvePtr cbar;
  double F = 0.0;
  double T = 1.0;

  void validate() const;
};

/// Everything a solver needs: market, preferences, cashflows and numerics.
struct Problem {
  Problem(Market m, PreferenceModel p, CashflowModel c, QuadSpec q = {}, RootSpec rs = {});

  Market market;
  PreferenceModel prefs;
  CashflowModel cashflows;
  QuadSpec quad;
  RootSpec root;
  CompositeRule rule;

  double horizon() const { return cashflows.T; }
};

/// Present value at t of future floor consumption net of income.
double floor_F1(const Problem& p, double t);
/// Discounted terminal floor.
double floor_F2(const Problem& p, double t);
double floor_F(const Problem& p, double t);

/// Present value of a continuous annuity paying `annual_amount` per year for `years`.
double terminal_F_from_annuity(double rate, double years, double annual_amount);

double utility_consumption(const PreferenceModel& prefs, const CashflowModel& cf, double t, double c);
double utility_terminal(const PreferenceModel& prefs, const CashflowModel& cf, double v);

struct ArrowPratt {
  double consumption;
  double terminal;
};

ArrowPratt arrow_pratt(const PreferenceModel& prefs, const CashflowModel& cf, double t, double c, double v);

}  // namespace lifecycle
