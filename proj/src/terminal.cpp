#include "lifecycle/terminal.hpp"

#include <cmath>
#include <string>

#include "lifecycle/errors.hpp"

namespace lifecycle {

namespace {

// b_hat (r - gamma^2 / (2 (b_hat - 1)))
double terminal_k(const Problem& p) {
  const double bh = p.prefs.b_hat;
  return bh * (p.market.r() - 0.5 / (bh - 1.0) * p.market.gamma_sq());
}

double checked_cushion(const Problem& p, double v2) {
  const double F20 = floor_F2(p, 0.0);
  if (!(v2 > F20))
    throw Error(ErrorCode::InfeasibleBudget,
                "v2=" + std::to_string(v2) + " must exceed F2(0)=" + std::to_string(F20));
  return v2 - F20;
}

}  // namespace

double solve_lambda2(const Problem& p, double v2) {
  const double x = checked_cushion(p, v2);
  const double bh = p.prefs.b_hat;
  const double T = p.horizon();
  return std::exp(-(p.prefs.beta - terminal_k(p)) * T + (1.0 - bh) * std::log1p(-bh) + (bh - 1.0) * std::log(x)) *
         p.prefs.a_hat;
}

TerminalSolution::TerminalSolution(const Problem& p, double v2)
    : tangency_(p.market.tangency()),
      r_(p.market.r()),
      horizon_(p.horizon()),
      floor_(p.cashflows.F),
      b_hat_(p.prefs.b_hat),
      v2_(v2),
      lambda2_(solve_lambda2(p, v2)),
      floor0_(floor_F2(p, 0.0)),
      kappa_(terminal_k(p) / (p.prefs.b_hat - 1.0)) {}

double TerminalSolution::wealth_V2(double t, double z) const {
  const double cushion = (v2_ - floor0_) * std::exp(kappa_ * t + std::log(z) / (b_hat_ - 1.0));
  return cushion + std::exp(-r_ * (horizon_ - t)) * floor_;
}

RiskyPosition TerminalSolution::policy_pi2(double t, double z) const {
  const double floor_t = std::exp(-r_ * (horizon_ - t)) * floor_;
  const double wealth = wealth_V2(t, z);
  RiskyPosition out;
  out.multiple = 1.0 / (1.0 - b_hat_);
  out.exposure = out.multiple * (wealth - floor_t) * tangency_;
  out.zero_wealth = !(wealth > 0.0);
  out.weight = out.zero_wealth ? Eigen::VectorXd::Zero(tangency_.size()) : Eigen::VectorXd(out.exposure / wealth);
  return out;
}

ValueDerivatives value_V2(const Problem& p, double v2) {
  const double x = checked_cushion(p, v2);
  const double bh = p.prefs.b_hat;
  const double pre = std::exp((-p.prefs.beta + terminal_k(p)) * p.horizon()) * p.prefs.a_hat;
  const double value = pre * std::pow(1.0 - bh, 1.0 - bh) / bh * std::pow(x, bh);
  const double second = -pre * std::pow(1.0 - bh, 2.0 - bh) * std::pow(x, bh - 2.0);
  return {value, solve_lambda2(p, v2), second};
}

}  // namespace lifecycle
