#include "lifecycle/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <boost/math/tools/toms748_solve.hpp>
#include <cstdint>
#include <memory>
#include <string>

namespace lifecycle {

void QuadSpec::validate() const {
  if (nodes < 2 || panels < 1)
    throw Error(ErrorCode::ConfigError, "quadrature needs nodes >= 2 and panels >= 1");
}

void RootSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1)
    throw Error(ErrorCode::ConfigError, "root tolerances must be positive");
}

CompositeRule::CompositeRule(const QuadSpec& spec) : spec_(spec) {
  spec_.validate();
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(spec_.nodes)),
      &gsl_integration_glfixed_table_free);
  if (!table) throw Error(ErrorCode::ConfigError, "cannot build Gauss-Legendre table");
  unit_x_.resize(spec_.nodes);
  unit_w_.resize(spec_.nodes);
  for (int k = 0; k < spec_.nodes; ++k) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(k), &x, &w, table.get());
    unit_x_[k] = x;
    unit_w_[k] = w;
  }
}

void CompositeRule::map(double t0, double t1, std::span<double> s, std::span<double> w) const {
  const double h = (t1 - t0) / spec_.panels;
  std::size_t i = 0;
  for (int p = 0; p < spec_.panels; ++p) {
    const double left = t0 + p * h;
    for (int k = 0; k < spec_.nodes; ++k, ++i) {
      s[i] = left + h * unit_x_[k];
      w[i] = h * unit_w_[k];
    }
  }
}

double integrate(const std::function<double(double)>& f, double t0, double t1, const QuadSpec& spec) {
  if (t1 < t0) throw Error(ErrorCode::Degenerate, "integration bounds reversed");
  return CompositeRule(spec).integrate(f, t0, t1);
}

RootResult find_root_detailed(const std::function<double(double)>& f, double lo, double hi,
                              const RootSpec& spec) {
  if (hi < lo) std::swap(lo, hi);
  const double flo = f(lo);
  const double fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    throw Error(ErrorCode::NonFinite, "root function not finite at bracket ends");
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo > 0.0) == (fhi > 0.0))
    throw Error(ErrorCode::NoBracket,
                "f(" + std::to_string(lo) + ")=" + std::to_string(flo) + " and f(" + std::to_string(hi) +
                    ")=" + std::to_string(fhi) + " share a sign");

  const auto tol = [&spec](double a, double b) {
    return std::abs(b - a) <= spec.abs_tol + spec.rel_tol * std::min(std::abs(a), std::abs(b));
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(spec.max_iter);
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  if (iters >= static_cast<std::uintmax_t>(spec.max_iter) && !tol(a, b))
    throw Error(ErrorCode::MaxIterations, "root not converged in " + std::to_string(spec.max_iter) + " iterations");
  const double fa = f(a);
  const double fb = f(b);
  const bool pick_a = std::abs(fa) <= std::abs(fb);
  return {pick_a ? a : b, pick_a ? fa : fb, static_cast<int>(iters)};
}

double find_root_log_decreasing(const std::function<double(double)>& f, const RootSpec& spec) {
  const auto h = [&f](double x) { return f(std::exp(x)); };
  double lo = 0.0, hi = 0.0;
  double step = 1.0;
  double f0 = h(0.0);
  if (!std::isfinite(f0)) throw Error(ErrorCode::NonFinite, "budget function not finite at lambda=1");
  if (f0 == 0.0) return 1.0;
  constexpr int kMaxExpansions = 64;
  int n = 0;
  if (f0 > 0.0) {
    for (;; step *= 2.0) {
      hi = lo + step;
      const double fh = h(hi);
      if (!(fh > 0.0)) break;
      lo = hi;
      if (++n > kMaxExpansions || hi > 700.0)
        throw Error(ErrorCode::NoBracket, "no sign change while expanding lambda upward");
    }
  } else {
    for (;; step *= 2.0) {
      lo = hi - step;
      const double fl = h(lo);
      if (!(fl < 0.0)) break;
      hi = lo;
      if (++n > kMaxExpansions || lo < -700.0)
        throw Error(ErrorCode::NoBracket, "no sign change while expanding lambda downward");
    }
  }
  RootSpec log_spec = spec;
  // Relative accuracy in lambda equals absolute accuracy in log(lambda).
  log_spec.abs_tol = std::min(spec.rel_tol, 1e-13);
  log_spec.rel_tol = 1e-15;
  return std::exp(find_root_detailed(h, lo, hi, log_spec).x);
}

}  // namespace lifecycle
