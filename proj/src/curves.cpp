#include "lifecycle/curves.hpp"

#include <algorithm>
#include <cmath>

#include "lifecycle/errors.hpp"

namespace lifecycle {

double ExpCurve::operator()(double t) const { return x0_ * std::exp(lam_ * t); }

ScaledExpCurve::ScaledExpCurve(double annual, double rate)
    : annual_(annual), rate_(rate), scale_(rate == 0.0 ? 1.0 : rate / std::expm1(rate)) {}

double ScaledExpCurve::operator()(double t) const { return scale_ * annual_ * std::exp(rate_ * t); }

TableCurve::TableCurve(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
  if (t_.empty() || t_.size() != v_.size())
    throw Error(ErrorCode::ConfigError, "table curve needs matching non-empty t and v");
  if (!std::is_sorted(t_.begin(), t_.end()) || std::adjacent_find(t_.begin(), t_.end()) != t_.end())
    throw Error(ErrorCode::ConfigError, "table curve knots must be strictly increasing");
}

double TableCurve::operator()(double t) const {
  if (t <= t_.front()) return v_.front();
  if (t >= t_.back()) return v_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto i = static_cast<std::size_t>(it - t_.begin());
  const double u = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
  return v_[i - 1] + u * (v_[i] - v_[i - 1]);
}

}  // namespace lifecycle
