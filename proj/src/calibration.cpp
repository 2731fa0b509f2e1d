#include "lifecycle/calibration.hpp"

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "lifecycle/errors.hpp"
#include "lifecycle/merge.hpp"

namespace lifecycle {

std::string_view variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::Full: return "FULL";
    case ModelVariant::AConst: return "A_CONST";
    case ModelVariant::BConst: return "B_CONST";
    case ModelVariant::BothConst: return "BOTH_CONST";
    case ModelVariant::CrraFull: return "CRRA_FULL";
  }
  return "FULL";
}

ModelVariant parse_variant(std::string_view name) {
  for (auto v : {ModelVariant::Full, ModelVariant::AConst, ModelVariant::BConst, ModelVariant::BothConst,
                 ModelVariant::CrraFull})
    if (variant_name(v) == name) return v;
  throw Error(ErrorCode::ConfigError, "unknown variant '" + std::string(name) +
                                          "' (expected FULL, A_CONST, B_CONST, BOTH_CONST or CRRA_FULL)");
}

CalibrationTarget target_curves_paper(double horizon, int points) {
  CalibrationTarget tg;
  tg.t.resize(points);
  tg.consumption.resize(points);
  tg.allocation.resize(points);
  for (int k = 0; k < points; ++k) {
    const double t = horizon * k / points;
    tg.t[k] = t;
    tg.consumption[k] = -25.0 * (t - 26.0) * (t - 26.0) + 37732.0;
    tg.allocation[k] = (100.0 - (t + 25.0)) / 100.0;
  }
  return tg;
}

CalibrationTarget make_target(const Curve& consumption, const Curve& allocation, double horizon, int points) {
  if (points < 1) throw Error(ErrorCode::ConfigError, "target needs at least one grid point");
  CalibrationTarget tg;
  for (int k = 0; k < points; ++k) {
    const double t = horizon * k / points;
    tg.t.push_back(t);
    tg.consumption.push_back(consumption(t));
    tg.allocation.push_back(allocation(t));
    if (!std::isfinite(tg.consumption.back()) || tg.consumption.back() == 0.0 || !(tg.allocation.back() > 0.0) ||
        !(tg.allocation.back() < 1.0))
      throw Error(ErrorCode::ConfigError, "target curves must be finite and nonzero with allocation in (0,1)");
  }
  return tg;
}

CalibParams published_params(ModelVariant v) {
  switch (v) {
    case ModelVariant::Full: return {-0.9849, 5.2864e7, -0.6673, -4.9731, -0.0340};
    case ModelVariant::AConst: return {-0.8325, 0.7997e7, 0.0, -4.0243, 0.0012};
    case ModelVariant::BConst: return {-0.8344, 1.8187e7, -0.0363, -4.1441, 0.0};
    case ModelVariant::BothConst: return {-0.8247, 0.3425e7, 0.0, -3.9697, 0.0};
    case ModelVariant::CrraFull: return {-4.4867, 0.6238e7, -0.8689, -9.7397, -0.0192};
  }
  return {};
}

CalibParams pin(ModelVariant v, CalibParams p) {
  if (v == ModelVariant::AConst || v == ModelVariant::BothConst) p.lam_a = 0.0;
  if (v == ModelVariant::BConst || v == ModelVariant::BothConst) p.lam_b = 0.0;
  return p;
}

namespace {

CashflowModel variant_cashflows(const CalibrationSetup& setup, ModelVariant v) {
  CashflowModel cf = setup.cashflows;
  if (v == ModelVariant::CrraFull) {
    cf.cbar = make_constant(0.0);
    cf.F = 0.0;
  }
  return cf;
}

void check_params(const CalibParams& p, double T) {
  const bool finite = std::isfinite(p.b_hat) && std::isfinite(p.a0) && std::isfinite(p.lam_a) &&
                      std::isfinite(p.b0) && std::isfinite(p.lam_b);
  const double b_end = p.b0 * std::exp(p.lam_b * T);
  if (!finite || !(p.b_hat < 1.0) || p.b_hat == 0.0 || p.b0 == 0.0 || !(p.b0 < 1.0) || !(b_end < 1.0) ||
      !(p.a0 > 0.0) || !std::isfinite(std::log(p.a0) + p.lam_a * T))
    throw Error(ErrorCode::InfeasibleParams, "parameters violate the preference constraints");
}

}  // namespace

Problem make_variant_problem(const CalibrationSetup& setup, ModelVariant v, const CalibParams& params) {
  const CalibParams p = pin(v, params);
  PreferenceModel prefs;
  prefs.beta = setup.beta;
  prefs.a_hat = setup.a_hat;
  prefs.b_hat = p.b_hat;
  prefs.a = make_exp(p.a0, p.lam_a);
  prefs.b = make_exp(p.b0, p.lam_b);
  return Problem(Market::validate(setup.market), prefs, variant_cashflows(setup, v), setup.quad, setup.root);
}

ResidualEvaluator::ResidualEvaluator(const CalibrationSetup& setup, ModelVariant variant, CalibrationTarget target)
    : variant_(variant), target_(std::move(target)) {
  const Market market = Market::validate(setup.market);
  const CashflowModel cf = variant_cashflows(setup, variant);
  cf.validate();
  r_ = market.r();
  g2_ = market.gamma_sq();
  tangency_sum_ = market.tangency().sum();
  beta_ = setup.beta;
  a_hat_ = setup.a_hat;
  v0_ = setup.v0;
  T_ = cf.T;
  root_ = setup.root;

  const CompositeRule rule(setup.quad);
  const auto n = static_cast<Eigen::Index>(rule.size());
  const auto M = static_cast<Eigen::Index>(target_.t.size());
  nodes_.resize(n, M);
  log_w_.resize(n, M);
  F1_.resize(M);
  F2_.resize(M);
  cbar_.resize(M);
  std::vector<double> s(rule.size()), w(rule.size());
  const auto floor_at = [&](double t) {
    return rule.integrate([&](double u) { return std::exp(-r_ * (u - t)) * ((*cf.cbar)(u) - (*cf.y)(u)); }, t, T_);
  };
  for (Eigen::Index k = 0; k < M; ++k) {
    const double t = target_.t[k];
    if (t < 0.0 || t > T_) throw Error(ErrorCode::ConfigError, "target grid must lie in [0,T]");
    rule.map(t, T_, s, w);
    for (Eigen::Index j = 0; j < n; ++j) {
      nodes_(j, k) = s[j];
      log_w_(j, k) = w[j] > 0.0 ? std::log(w[j]) : -std::numeric_limits<double>::infinity();
    }
    F1_[k] = floor_at(t);
    F2_[k] = std::exp(-r_ * (T_ - t)) * cf.F;
    cbar_[k] = (*cf.cbar)(t);
  }
  rule.map(0.0, T_, s, w);
  split_s_ = Eigen::Map<Eigen::ArrayXd>(s.data(), n);
  split_w_ = Eigen::Map<Eigen::ArrayXd>(w.data(), n);
  F10_ = floor_at(0.0);
  F20_ = std::exp(-r_ * T_) * cf.F;
}

void ResidualEvaluator::model_curves(const CalibParams& params, std::vector<double>& c,
                                     std::vector<double>& pi) const {
  const CalibParams p = pin(variant_, params);
  check_params(p, T_);
  const double log_a0 = std::log(p.a0);
  const double log_a_hat = std::log(a_hat_);
  const double bh = p.b_hat;

  const auto n = split_s_.size();
  std::vector<double> lc(n), ex(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = split_s_[j];
    const double b = p.b0 * std::exp(p.lam_b * s);
    lc[j] = detail::log_chi(b, log_a0 + p.lam_a * s, s, beta_, log_a_hat, bh, r_, g2_, T_);
    ex[j] = (bh - 1.0) / (b - 1.0);
  }
  double v1 = 0.0;
  try {
    v1 = detail::solve_split_equation({split_w_.data(), static_cast<std::size_t>(n)}, lc, ex, v0_, F10_, F20_, root_);
  } catch (const Error& e) {
    throw Error(ErrorCode::InfeasibleParams, e.what());
  }
  const double cushion2_0 = v0_ - v1 - F20_;
  const double k_hat = bh * (r_ - 0.5 / (bh - 1.0) * g2_);
  const double log_lambda =
      -(beta_ - k_hat) * T_ + (1.0 - bh) * std::log1p(-bh) + log_a_hat + (bh - 1.0) * std::log(cushion2_0);
  const double kappa = k_hat / (bh - 1.0);
  const double eta_hat = 1.0 / (bh - 1.0);
  const double m2 = 1.0 / (1.0 - bh);

  const auto M = static_cast<Eigen::Index>(target_.t.size());
  c.resize(M);
  pi.resize(M);
  const double r = r_, g2 = g2_, beta = beta_;
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < M; ++k) {
    const double t = target_.t[k];
    const auto s = nodes_.col(k).array();
    const Eigen::ArrayXd b = p.b0 * (p.lam_b * s).exp();
    const Eigen::ArrayXd eta = (b - 1.0).inverse();
    const Eigen::ArrayXd kk = r - 0.5 * eta * g2;
    const Eigen::ArrayXd e =
        (log_w_.col(k).array() + (1.0 - b).log() +
         eta * (beta * s - b * kk * (s - t) - (log_a0 + p.lam_a * s) + log_lambda) -
         eta * (r - 0.5 * (eta - 1.0) * g2) * t)
            .exp();
    const double cushion1 = e.sum();
    const double scaled1 = -(eta * e).sum();

    const double bt = p.b0 * std::exp(p.lam_b * t);
    const double eta_t = 1.0 / (bt - 1.0);
    c[k] = std::exp(std::log1p(-bt) + eta_t * (log_lambda + beta * t - log_a0 - p.lam_a * t) +
                    log_kernel_power_moment(r, g2, eta_t, t)) +
           cbar_[k];
    const double cushion2 = cushion2_0 * std::exp(kappa * t + log_kernel_power_moment(r, g2, eta_hat, t));
    const double ev = cushion1 + F1_[k] + cushion2 + F2_[k];
    pi[k] = tangency_sum_ * (scaled1 + m2 * cushion2) / ev;
  }
}

void ResidualEvaluator::evaluate(const CalibParams& params, Eigen::Ref<Eigen::VectorXd> out) const {
  std::vector<double> c, pi;
  model_curves(params, c, pi);
  const auto M = static_cast<Eigen::Index>(target_.t.size());
  for (Eigen::Index k = 0; k < M; ++k) {
    out[k] = (c[k] - target_.consumption[k]) / target_.consumption[k];
    out[M + k] = (pi[k] - target_.allocation[k]) / target_.allocation[k];
  }
  if (!out.allFinite()) throw Error(ErrorCode::InfeasibleParams, "non-finite residuals");
}

Eigen::VectorXd ResidualEvaluator::operator()(const CalibParams& params) const {
  Eigen::VectorXd out(size());
  evaluate(params, out);
  return out;
}

FittedCurves ResidualEvaluator::curves(const CalibParams& params) const {
  FittedCurves fc;
  model_curves(params, fc.consumption, fc.allocation);
  fc.t = target_.t;
  fc.consumption_target = target_.consumption;
  fc.allocation_target = target_.allocation;
  return fc;
}

Eigen::VectorXd residuals(ModelVariant v, const CalibParams& params, const CalibrationTarget& target,
                          const CalibrationSetup& setup) {
  return ResidualEvaluator(setup, v, target)(params);
}

double sum_of_squares(const Eigen::Ref<const Eigen::VectorXd>& r) { return r.squaredNorm(); }

// ---------------------------------------------------------------------------
// Optimizer

namespace {

enum Slot { kBHat = 0, kA0, kLamA, kB0, kLamB };

class Transform {
 public:
  Transform(ModelVariant v, bool positive_branch) : variant_(v), positive_(positive_branch) {
    free_ = {kBHat, kA0};
    if (v != ModelVariant::AConst && v != ModelVariant::BothConst) free_.push_back(kLamA);
    free_.push_back(kB0);
    if (v != ModelVariant::BConst && v != ModelVariant::BothConst) free_.push_back(kLamB);
  }

  int dim() const { return static_cast<int>(free_.size()); }
  const std::vector<int>& free() const { return free_; }

  Eigen::VectorXd to_theta(const CalibParams& p) const {
    const double full[5] = {std::log(1.0 - p.b_hat), std::log(p.a0), p.lam_a,
                            positive_ ? std::log(p.b0 / (1.0 - p.b0)) : std::log(-p.b0), p.lam_b};
    Eigen::VectorXd th(dim());
    for (int i = 0; i < dim(); ++i) th[i] = full[free_[i]];
    return th;
  }

  CalibParams from_theta(const Eigen::Ref<const Eigen::VectorXd>& th) const {
    double full[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < dim(); ++i) full[free_[i]] = th[i];
    CalibParams p;
    p.b_hat = 1.0 - std::exp(full[kBHat]);
    p.a0 = std::exp(full[kA0]);
    p.lam_a = full[kLamA];
    p.b0 = positive_ ? 1.0 / (1.0 + std::exp(-full[kB0])) : -std::exp(full[kB0]);
    p.lam_b = full[kLamB];
    return pin(variant_, p);
  }

  Eigen::VectorXd simplex_steps() const {
    const double step[5] = {0.1, 0.5, 0.05, 0.1, 0.005};
    Eigen::VectorXd s(dim());
    for (int i = 0; i < dim(); ++i) s[i] = step[free_[i]];
    return s;
  }

 private:
  ModelVariant variant_;
  bool positive_;
  std::vector<int> free_;
};

constexpr double kPenalty = 1e12;

struct Objective {
  const ResidualEvaluator* eval;
  const Transform* tr;
  mutable std::atomic<int> evals{0};

  double ssrd(const Eigen::Ref<const Eigen::VectorXd>& th) const {
    ++evals;
    try {
      return sum_of_squares((*eval)(tr->from_theta(th)));
    } catch (const Error&) {
      return kPenalty;
    }
  }
};

double simplex_cost(const gsl_vector* x, void* data) {
  const auto* obj = static_cast<const Objective*>(data);
  const Eigen::Map<const Eigen::VectorXd> th(x->data, static_cast<Eigen::Index>(x->size));
  return obj->ssrd(th);
}

void run_simplex(const Objective& obj, Eigen::VectorXd& th, const OptimizerSpec& spec) {
  const auto n = static_cast<std::size_t>(th.size());
  using Vec = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;
  Vec x(gsl_vector_alloc(n), &gsl_vector_free), step(gsl_vector_alloc(n), &gsl_vector_free);
  const Eigen::VectorXd steps = obj.tr->simplex_steps();
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, th[static_cast<Eigen::Index>(i)]);
    gsl_vector_set(step.get(), i, steps[static_cast<Eigen::Index>(i)]);
  }
  gsl_multimin_function fn{&simplex_cost, n, const_cast<Objective*>(&obj)};
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());
  for (int it = 0; it < spec.simplex_max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), spec.simplex_size_tol) == GSL_SUCCESS) break;
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(nm.get());
  for (std::size_t i = 0; i < n; ++i) th[static_cast<Eigen::Index>(i)] = gsl_vector_get(best, i);
}

struct ResidualFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const Objective* obj;
  int n_inputs;
  int n_values;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }

  int operator()(const Eigen::VectorXd& th, Eigen::VectorXd& fvec) const {
    ++obj->evals;
    try {
      obj->eval->evaluate(obj->tr->from_theta(th), fvec);
    } catch (const Error&) {
      fvec.setConstant(std::sqrt(kPenalty / n_values));
    }
    return 0;
  }
};

}  // namespace

CalibrationResult fit_from(const ResidualEvaluator& eval, const CalibParams& start, const OptimizerSpec& spec) {
  const Transform tr(eval.variant(), spec.positive_b_branch);
  Objective obj{&eval, &tr};
  Eigen::VectorXd th = tr.to_theta(pin(eval.variant(), start));

  run_simplex(obj, th, spec);
  const Eigen::VectorXd after_simplex = th;
  const double simplex_value = obj.ssrd(th);

  ResidualFunctor functor{&obj, tr.dim(), static_cast<int>(eval.size())};
  Eigen::NumericalDiff<ResidualFunctor> diff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor>> lm(diff);
  lm.parameters.maxfev = spec.lm_max_evals;
  lm.parameters.xtol = 1e-10;
  lm.parameters.ftol = 1e-12;
  const auto status = lm.minimize(th);

  double value = obj.ssrd(th);
  if (!(value <= simplex_value)) {
    th = after_simplex;
    value = simplex_value;
  }

  CalibrationResult res;
  res.variant = eval.variant();
  res.params = tr.from_theta(th);
  res.ssrd = value;
  res.iterations = obj.evals.load();
  using S = Eigen::LevenbergMarquardtSpace::Status;
  res.converged = value < kPenalty &&
                  (status == S::RelativeReductionTooSmall || status == S::RelativeErrorTooSmall ||
                   status == S::RelativeErrorAndReductionTooSmall || status == S::CosinusTooSmall ||
                   status == S::FtolTooSmall || status == S::XtolTooSmall);
  if (value < kPenalty) {
    const Eigen::VectorXd r = eval(res.params);
    const auto M = r.size() / 2;
    res.ssrd_consumption = r.head(M).squaredNorm();
    res.ssrd_allocation = r.tail(M).squaredNorm();
  }
  return res;
}

CalibrationResult fit(ModelVariant v, const CalibrationTarget& target, const CalibrationSetup& setup,
                      const CalibParams& centre, const OptimizerSpec& spec) {
  if (spec.starts < 1) throw Error(ErrorCode::ConfigError, "optimizer needs at least one start");
  const ResidualEvaluator eval(setup, v, target);

  // Latin hypercube over the five natural parameters, one stratum per start.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::array<double, 5>> factors(static_cast<std::size_t>(spec.starts));
  for (int d = 0; d < 5; ++d) {
    std::vector<int> perm(static_cast<std::size_t>(spec.starts));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < spec.starts; ++i) {
      const double u = (perm[i] + unit(rng)) / spec.starts;
      factors[i][d] = 1.0 - spec.spread + 2.0 * spec.spread * u;
    }
  }

  std::vector<CalibrationResult> results(static_cast<std::size_t>(spec.starts));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < spec.starts; ++i) {
    CalibParams st = centre;
    st.b_hat *= factors[i][0];
    st.a0 *= factors[i][1];
    st.lam_a *= factors[i][2];
    st.b0 = spec.positive_b_branch ? std::min(0.9, 0.5 * factors[i][3]) : st.b0 * factors[i][3];
    st.lam_b *= factors[i][4];
    results[i] = fit_from(eval, st, spec);
  }

  CalibrationResult best = results.front();
  best.best_start = 0;
  int total = 0;
  for (int i = 0; i < spec.starts; ++i) {
    total += results[i].iterations;
    best.start_ssrd.push_back(results[i].ssrd);
    if (results[i].ssrd < best.ssrd) {
      auto keep = std::move(best.start_ssrd);
      best = results[i];
      best.start_ssrd = std::move(keep);
      best.best_start = i;
    }
  }
  best.iterations = total;
  return best;
}

void write_calibration_json(std::ostream& os, const CalibrationResult& result, const std::string& header_hash,
                            std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["config_hash"] = header_hash;
  j["seed"] = seed;
  j["variant"] = std::string(variant_name(result.variant));
  j["b_hat"] = result.params.b_hat;
  j["a0"] = result.params.a0;
  j["lam_a"] = result.params.lam_a;
  j["b0"] = result.params.b0;
  j["lam_b"] = result.params.lam_b;
  j["ssrd"] = result.ssrd;
  j["ssrd_consumption"] = result.ssrd_consumption;
  j["ssrd_allocation"] = result.ssrd_allocation;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["best_start"] = result.best_start;
  j["start_ssrd"] = result.start_ssrd;
  os << j.dump(2) << '\n';
}

void write_calibration_csv(std::ostream& os, const FittedCurves& curves) {
  os << std::setprecision(12) << "t,c_model,c_target,pi_model,pi_target\n";
  for (std::size_t k = 0; k < curves.t.size(); ++k)
    os << curves.t[k] << ',' << curves.consumption[k] << ',' << curves.consumption_target[k] << ','
       << curves.allocation[k] << ',' << curves.allocation_target[k] << '\n';
}

}  // namespace lifecycle
