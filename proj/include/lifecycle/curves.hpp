#pragma once

#include <memory>
#include <vector>

namespace lifecycle {

/// Deterministic function of age (years since the start of the plan).
class Curve {
 public:
  virtual ~Curve() = default;
  virtual double operator()(double t) const = 0;
};

using CurvePtr = std::shared_ptr<const Curve>;

/// x0 * exp(lam * t)
class ExpCurve final : public Curve {
 public:
  ExpCurve(double x0, double lam) : x0_(x0), lam_(lam) {}
  double operator()(double t) const override;
  double x0() const { return x0_; }
  double lam() const { return lam_; }

 private:
  double x0_;
  double lam_;
};

/// Rate curve whose integral over year [k, k+1] equals annual * exp(rate * k):
/// rate / (exp(rate) - 1) * annual * exp(rate * t).
class ScaledExpCurve final : public Curve {
 public:
  ScaledExpCurve(double annual, double rate);
  double operator()(double t) const override;
  double annual() const { return annual_; }
  double rate() const { return rate_; }

 private:
  double annual_;
  double rate_;
  double scale_;
};

/// Piecewise-linear interpolation, flat beyond the end knots.
class TableCurve final : public Curve {
 public:
  TableCurve(std::vector<double> t, std::vector<double> v);
  double operator()(double t) const override;
  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& values() const { return v_; }

 private:
  std::vector<double> t_;
  std::vector<double> v_;
};

inline CurvePtr make_exp(double x0, double lam) { return std::make_shared<ExpCurve>(x0, lam); }
inline CurvePtr make_constant(double x) { return std::make_shared<ExpCurve>(x, 0.0); }
inline CurvePtr make_scaled_exp(double annual, double rate) {
  return std::make_shared<ScaledExpCurve>(annual, rate);
}

}  // namespace lifecycle
