#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lifecycle/errors.hpp"

namespace lifecycle {

/// Composite Gauss-Legendre layout: `panels` equal sub-intervals with `nodes` points each.
struct QuadSpec {
  int nodes = 16;
  int panels = 16;

  int total() const { return nodes * panels; }
  void validate() const;
};

struct RootSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;

  void validate() const;
};

/// Fixed composite rule. Reference abscissae are stored on [0,1] so mapping
/// onto [t0,t1] is a single affine transform per panel.
class CompositeRule {
 public:
  explicit CompositeRule(const QuadSpec& spec = {});

  const QuadSpec& spec() const { return spec_; }
  std::size_t size() const { return static_cast<std::size_t>(spec_.total()); }

  /// Fills `s` and `w` (both of length size()) with nodes and weights on [t0,t1].
  void map(double t0, double t1, std::span<double> s, std::span<double> w) const;

  template <class F>
  double integrate(F&& f, double t0, double t1) const {
    if (t1 == t0) return 0.0;
    const double h = (t1 - t0) / spec_.panels;
    double acc = 0.0;
    for (int p = 0; p < spec_.panels; ++p) {
      const double left = t0 + p * h;
      double panel = 0.0;
      for (int k = 0; k < spec_.nodes; ++k) {
        const double v = f(left + h * unit_x_[k]);
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "integrand returned a non-finite value");
        panel += unit_w_[k] * v;
      }
      acc += h * panel;
    }
    return acc;
  }

 private:
  QuadSpec spec_;
  std::vector<double> unit_x_;
  std::vector<double> unit_w_;
};

/// Integrate f over [t0,t1] with a freshly built rule. Prefer a cached CompositeRule in hot loops.
double integrate(const std::function<double(double)>& f, double t0, double t1, const QuadSpec& spec = {});

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Bracketed root of f on [lo,hi] (TOMS 748). Throws NoBracket when f(lo) and f(hi)
/// share a strict sign and MaxIterations when the tolerance is not met in time.
RootResult find_root_detailed(const std::function<double(double)>& f, double lo, double hi,
                              const RootSpec& spec = {});

inline double find_root(const std::function<double(double)>& f, double lo, double hi,
                        const RootSpec& spec = {}) {
  return find_root_detailed(f, lo, hi, spec).x;
}

/// Root of a strictly decreasing positive-argument function f(lambda) with limits of
/// opposite sign at 0 and infinity. The search runs in x = log(lambda), expanding
/// the bracket outward from lambda = 1 with a step that doubles each time.
double find_root_log_decreasing(const std::function<double(double)>& f, const RootSpec& spec = {});

}  // namespace lifecycle
