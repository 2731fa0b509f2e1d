#include "lifecycle/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "lifecycle/errors.hpp"

namespace lifecycle {

namespace {

double log_moment(const Problem& p, double eta, double t) {
  return log_kernel_power_moment(p.market.r(), p.market.gamma_sq(), eta, t);
}

// (v2 - F2(0)) e^{kappa t} E[z^{eta_hat}]
double expected_terminal_cushion(const MergedPolicy& policy, double t) {
  const auto& p = policy.problem();
  const auto& w = policy.terminal();
  const double eta_hat = 1.0 / (p.prefs.b_hat - 1.0);
  return (w.v2() - w.floor0()) * std::exp(w.cushion_rate() * t + log_moment(p, eta_hat, t));
}

struct ExpectedParts {
  double cushion1;
  double scaled1;  // integral of g M / (1 - b)
};

ExpectedParts expected_consumption_parts(const MergedPolicy& policy, double t) {
  const auto& p = policy.problem();
  const auto& c = policy.consumption();
  const auto& b = *p.prefs.b;
  ExpectedParts out{0.0, 0.0};
  out.cushion1 = p.rule.integrate(
      [&](double s) {
        const double eta = 1.0 / (b(s) - 1.0);
        return std::exp(c.log_g_kernel(s, t) + log_moment(p, eta, t));
      },
      t, p.horizon());
  out.scaled1 = p.rule.integrate(
      [&](double s) {
        const double bs = b(s);
        return std::exp(c.log_g_kernel(s, t) + log_moment(p, 1.0 / (bs - 1.0), t)) / (1.0 - bs);
      },
      t, p.horizon());
  return out;
}

void check_uniform(const std::vector<double>& t, double dt) {
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t[k] - t[k - 1] - dt) > 1e-9 * std::max(1.0, dt * 1e6))
      throw Error(ErrorCode::Degenerate, "path grid spacing does not match dt");
}

void allocate(PathRecord& rec, std::size_t n, int assets) {
  rec.t.resize(n);
  rec.z.resize(n);
  rec.prices.resize(assets, static_cast<Eigen::Index>(n));
  rec.pi.resize(assets, static_cast<Eigen::Index>(n));
  rec.exposure.resize(assets, static_cast<Eigen::Index>(n));
  rec.c_star.resize(n);
  rec.V_star.resize(n);
  rec.V1.resize(n);
  rec.V2.resize(n);
  rec.F_t.resize(n);
  rec.income.resize(n);
}

void store(PathRecord& rec, std::size_t k, const Market& m, const PolicySlice& sl, const SliceValues& v,
           double t, double z, const Eigen::Ref<const Eigen::VectorXd>& w) {
  rec.t[k] = t;
  rec.z[k] = z;
  rec.prices.col(static_cast<Eigen::Index>(k)) = stock_price(m, t, w);
  rec.c_star[k] = v.c_star;
  rec.V1[k] = v.V1;
  rec.V2[k] = v.V2;
  rec.V_star[k] = v.V_star();
  rec.F_t[k] = sl.F1 + sl.F2;
  rec.income[k] = sl.income;
  rec.exposure.col(static_cast<Eigen::Index>(k)) = v.exposure_scale * m.tangency();
  const double scale = std::max({std::abs(v.V1), std::abs(v.V2), 1.0});
  if (std::abs(v.V_star()) <= kZeroWealthTolerance * scale)
    rec.pi.col(static_cast<Eigen::Index>(k)).setZero();
  else
    rec.pi.col(static_cast<Eigen::Index>(k)) = rec.exposure.col(static_cast<Eigen::Index>(k)) / v.V_star();
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double expected_consumption(const MergedPolicy& policy, double t) {
  const auto& p = policy.problem();
  const double eta = 1.0 / ((*p.prefs.b)(t)-1.0);
  return std::exp(policy.consumption().log_g_kernel(t, t) + log_moment(p, eta, t)) + (*p.cashflows.cbar)(t);
}

double expected_wealth(const MergedPolicy& policy, double t) {
  const auto& p = policy.problem();
  return expected_consumption_parts(policy, t).cushion1 + expected_terminal_cushion(policy, t) + floor_F(p, t);
}

Eigen::VectorXd expected_exposure(const MergedPolicy& policy, double t) {
  const auto& p = policy.problem();
  const double m2 = 1.0 / (1.0 - p.prefs.b_hat);
  const double scale = expected_consumption_parts(policy, t).scaled1 + m2 * expected_terminal_cushion(policy, t);
  return scale * p.market.tangency();
}

Eigen::VectorXd expected_allocation_estimator(const MergedPolicy& policy, double t) {
  const double ev = expected_wealth(policy, t);
  if (std::abs(ev) <= kZeroWealthTolerance * std::max(1.0, std::abs(policy.v0())))
    throw Error(ErrorCode::ZeroExpectedWealth, "expected wealth is ~0 at t=" + std::to_string(t));
  return expected_exposure(policy, t) / ev;
}

ExpectedCurves expected_curves(const MergedPolicy& policy, const std::vector<double>& grid) {
  const auto& p = policy.problem();
  const int assets = p.market.assets();
  const double r = p.market.r();
  const double g2 = p.market.gamma_sq();
  const double m2 = 1.0 / (1.0 - p.prefs.b_hat);
  const std::size_t n = grid.size();

  ExpectedCurves out;
  out.t = grid;
  out.c_star.resize(n);
  out.V_star.resize(n);
  out.exposure.resize(assets, static_cast<Eigen::Index>(n));
  out.estimator.resize(assets, static_cast<Eigen::Index>(n));
  std::vector<double> scale(n);

#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid[k];
    const PolicySlice sl = build_slice(policy, t);
    double cushion1 = 0.0, scaled1 = 0.0;
    if (sl.eta.size() > 0) {
      const Eigen::ArrayXd log_m = -sl.eta * (r - 0.5 * (sl.eta - 1.0) * g2) * t;
      const Eigen::ArrayXd e = (sl.log_coef + log_m).exp();
      cushion1 = e.sum();
      // 1 / (1 - b) = -eta
      scaled1 = -(sl.eta * e).sum();
    }
    const double cushion2 = expected_terminal_cushion(policy, t);
    out.c_star[k] = std::exp(sl.log_c + log_kernel_power_moment(r, g2, sl.c_eta, t)) + sl.cbar;
    out.V_star[k] = cushion1 + sl.F1 + cushion2 + sl.F2;
    scale[k] = scaled1 + m2 * cushion2;
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.exposure.col(static_cast<Eigen::Index>(k)) = scale[k] * p.market.tangency();
    out.estimator.col(static_cast<Eigen::Index>(k)) = out.exposure.col(static_cast<Eigen::Index>(k)) / out.V_star[k];
  }
  return out;
}

std::vector<double> uniform_grid(double horizon, int steps) {
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) g[k] = horizon * k / steps;
  return g;
}

PathRecord record_path(const MergedPolicy& policy, const KernelPath& path) {
  const auto& p = policy.problem();
  const double eta_hat = 1.0 / (p.prefs.b_hat - 1.0);
  const double m2 = 1.0 / (1.0 - p.prefs.b_hat);
  PathRecord rec;
  allocate(rec, path.t.size(), p.market.assets());
  rec.w = path.w;
  Eigen::ArrayXd scratch;
  for (std::size_t k = 0; k < path.t.size(); ++k) {
    const PolicySlice sl = build_slice(policy, path.t[k]);
    const auto v = evaluate_slice(sl, eta_hat, m2, std::log(path.z[k]), scratch);
    store(rec, k, p.market, sl, v, path.t[k], path.z[k], path.w.col(static_cast<Eigen::Index>(k)));
  }
  return rec;
}

PathRecord record_path(const MergedPolicy& policy, const PolicySlices& slices, const KernelPath& path) {
  if (slices.size() != path.t.size()) throw Error(ErrorCode::BadDimension, "slice grid does not match path grid");
  const auto& m = policy.problem().market;
  PathRecord rec;
  allocate(rec, path.t.size(), m.assets());
  rec.w = path.w;
  Eigen::ArrayXd scratch;
  for (std::size_t k = 0; k < path.t.size(); ++k) {
    const auto v = slices.evaluate(k, std::log(path.z[k]), scratch);
    store(rec, k, m, slices[k], v, path.t[k], path.z[k], path.w.col(static_cast<Eigen::Index>(k)));
  }
  return rec;
}

std::vector<PathRecord> simulate_policy(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed) {
  if (steps < 1 || n_paths < 1) throw Error(ErrorCode::Degenerate, "steps and n_paths must be >= 1");
  const auto& p = policy.problem();
  const PolicySlices slices(policy, uniform_grid(p.horizon(), steps));
  std::vector<PathRecord> out(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n_paths; ++i) {
    const auto path = simulate_kernel_path(p.market, p.horizon(), steps, seed, static_cast<std::uint64_t>(i));
    out[i] = record_path(policy, slices, path);
  }
  return out;
}

PathRecord replay_scenario(const MergedPolicy& policy, const std::vector<double>& t,
                           const std::vector<double>& price) {
  const auto& m = policy.problem().market;
  if (m.assets() != 1) throw Error(ErrorCode::MultiAssetUnsupported, "scenario replay supports one risky asset");
  if (t.empty() || t.size() != price.size()) throw Error(ErrorCode::ScenarioParse, "scenario needs matching t and price");
  const double p0 = m.params().p0[0];
  const double mu = m.params().mu[0];
  const double sigma = m.params().sigma(0, 0);
  if (std::abs(t.front()) > 1e-12) throw Error(ErrorCode::ScenarioParse, "scenario must start at t=0");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(price[k] > 0.0)) throw Error(ErrorCode::NonPositivePrice, "scenario price must be positive");
    if (k > 0 && !(t[k] > t[k - 1])) throw Error(ErrorCode::ScenarioParse, "scenario times must increase");
    if (t[k] > policy.problem().horizon() + 1e-9) throw Error(ErrorCode::ScenarioParse, "scenario runs past T");
  }
  if (std::abs(price.front() / p0 - 1.0) > 1e-9) throw Error(ErrorCode::ScenarioParse, "scenario must start at p0");

  KernelPath path;
  path.t = t;
  path.z.resize(t.size());
  path.w.resize(1, static_cast<Eigen::Index>(t.size()));
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double w = (std::log(price[k] / p0) - (mu - 0.5 * sigma * sigma) * t[k]) / sigma;
    path.w(0, static_cast<Eigen::Index>(k)) = w;
    path.z[k] = kernel_value(m, t[k], path.w.col(static_cast<Eigen::Index>(k)));
  }
  return record_path(policy, path);
}

double verify_self_financing(const MergedPolicy& policy, const PathRecord& path, double dt) {
  check_uniform(path.t, dt);
  const auto& m = policy.problem().market;
  const Eigen::VectorXd excess = m.params().mu.array() - m.r();
  double v = path.V_star.front();
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::VectorXd dw = path.w.col(kk + 1) - path.w.col(kk);
    const auto x = path.exposure.col(kk);
    v += (m.r() * v + x.dot(excess) - path.c_star[k] + path.income[k]) * dt + x.dot(m.params().sigma * dw);
    const double target = path.V_star[k + 1];
    worst = std::max(worst, std::abs(v - target) / (std::abs(target) + 1.0));
  }
  return worst;
}

PathRecord subsample(const PathRecord& path, int stride) {
  if (stride < 1 || (path.size() - 1) % static_cast<std::size_t>(stride) != 0)
    throw Error(ErrorCode::Degenerate, "stride must divide the number of steps");
  const std::size_t n = (path.size() - 1) / static_cast<std::size_t>(stride) + 1;
  PathRecord out;
  allocate(out, n, static_cast<int>(path.pi.rows()));
  out.w.resize(path.w.rows(), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i * static_cast<std::size_t>(stride);
    const auto ii = static_cast<Eigen::Index>(i);
    const auto kk = static_cast<Eigen::Index>(k);
    out.t[i] = path.t[k];
    out.z[i] = path.z[k];
    out.w.col(ii) = path.w.col(kk);
    out.prices.col(ii) = path.prices.col(kk);
    out.pi.col(ii) = path.pi.col(kk);
    out.exposure.col(ii) = path.exposure.col(kk);
    out.c_star[i] = path.c_star[k];
    out.V_star[i] = path.V_star[k];
    out.V1[i] = path.V1[k];
    out.V2[i] = path.V2[k];
    out.F_t[i] = path.F_t[k];
    out.income[i] = path.income[k];
  }
  return out;
}

namespace {

BudgetEstimate finish_budget(const MergedPolicy& policy, const std::vector<double>& samples) {
  const auto& p = policy.problem();
  BudgetEstimate est;
  est.paths = static_cast<int>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / samples.size();
  double ss = 0.0;
  for (double x : samples) ss += (x - est.mean) * (x - est.mean);
  est.std_error = samples.size() > 1 ? std::sqrt(ss / (samples.size() - 1) / samples.size()) : 0.0;
  const double r = p.market.r();
  est.target = policy.v0() +
               p.rule.integrate([&](double s) { return std::exp(-r * s) * (*p.cashflows.y)(s); }, 0.0, p.horizon());
  return est;
}

FloorScan finish_scan(const std::vector<double>& min_w, const std::vector<double>& min_c,
                      const std::vector<long>& bad_w, const std::vector<long>& bad_c) {
  FloorScan out;
  out.paths = static_cast<int>(min_w.size());
  out.min_wealth_cushion = *std::min_element(min_w.begin(), min_w.end());
  out.min_consumption_cushion = *std::min_element(min_c.begin(), min_c.end());
  for (std::size_t i = 0; i < bad_w.size(); ++i) {
    out.wealth_violations += bad_w[i];
    out.consumption_violations += bad_c[i];
  }
  return out;
}

}  // namespace

BudgetEstimate budget_check(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed) {
  if (steps < 1 || n_paths < 1) throw Error(ErrorCode::Degenerate, "steps and n_paths must be >= 1");
  const auto& p = policy.problem();
  const auto& m = p.market;
  const double T = p.horizon();
  const double dt = T / steps;
  const double sq = std::sqrt(dt);
  const double drift = -(m.r() + 0.5 * m.gamma_sq()) * dt;
  const int assets = m.assets();

  std::vector<double> log_c(steps + 1), c_eta(steps + 1), cbar(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = T * k / steps;
    const double bt = (*p.prefs.b)(t);
    c_eta[k] = 1.0 / (bt - 1.0);
    log_c[k] = std::log1p(-bt) +
               c_eta[k] * (std::log(policy.lambda1_star()) + p.prefs.beta * t - std::log((*p.prefs.a)(t)));
    cbar[k] = (*p.cashflows.cbar)(t);
  }
  const auto& term = policy.terminal();
  const double eta_hat = 1.0 / (p.prefs.b_hat - 1.0);
  const double log_cushion_T = std::log(term.v2() - term.floor0()) + term.cushion_rate() * T;

  std::vector<double> samples(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_paths; ++i) {
    auto rng = path_rng(seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    double log_z = 0.0;
    double prev = std::exp(log_c[0]) + cbar[0];
    double integral = 0.0;
    for (int k = 1; k <= steps; ++k) {
      double shock = 0.0;
      for (int a = 0; a < assets; ++a) shock += m.gamma()[a] * sq * normal(rng);
      log_z += drift - shock;
      const double zc = std::exp(log_z) * (std::exp(log_c[k] + c_eta[k] * log_z) + cbar[k]);
      integral += 0.5 * dt * (prev + zc);
      prev = zc;
    }
    const double terminal_wealth = std::exp(log_cushion_T + eta_hat * log_z) + p.cashflows.F;
    samples[i] = integral + std::exp(log_z) * terminal_wealth;
  }
  return finish_budget(policy, samples);
}

FloorScan floor_scan(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed) {
  if (steps < 1 || n_paths < 1) throw Error(ErrorCode::Degenerate, "steps and n_paths must be >= 1");
  const auto& p = policy.problem();
  const auto& m = p.market;
  const PolicySlices slices(policy, uniform_grid(p.horizon(), steps));
  const double dt = p.horizon() / steps;
  const double sq = std::sqrt(dt);
  const double drift = -(m.r() + 0.5 * m.gamma_sq()) * dt;
  const int assets = m.assets();

  std::vector<double> min_w(n_paths), min_c(n_paths);
  std::vector<long> bad_w(n_paths, 0), bad_c(n_paths, 0);
#pragma omp parallel
  {
    Eigen::ArrayXd scratch;
#pragma omp for schedule(dynamic, 16)
    for (int i = 0; i < n_paths; ++i) {
      auto rng = path_rng(seed, static_cast<std::uint64_t>(i));
      std::normal_distribution<double> normal;
      double log_z = 0.0;
      double mw = INFINITY, mc = INFINITY;
      for (int k = 0; k <= steps; ++k) {
        if (k > 0) {
          double shock = 0.0;
          for (int a = 0; a < assets; ++a) shock += m.gamma()[a] * sq * normal(rng);
          log_z += drift - shock;
        }
        const auto v = slices.evaluate(static_cast<std::size_t>(k), log_z, scratch);
        const double wc = v.V_star() - (slices[k].F1 + slices[k].F2);
        const double cc = v.c_star - slices[k].cbar;
        if (!(wc > 0.0)) ++bad_w[i];
        if (!(cc > 0.0)) ++bad_c[i];
        mw = std::min(mw, wc);
        mc = std::min(mc, cc);
      }
      min_w[i] = mw;
      min_c[i] = mc;
    }
  }
  return finish_scan(min_w, min_c, bad_w, bad_c);
}

QuantileSummary summarize_paths(const std::vector<PathRecord>& paths, const std::vector<double>& probs) {
  if (paths.empty()) throw Error(ErrorCode::Degenerate, "no paths to summarize");
  const std::size_t n = paths.front().size();
  QuantileSummary q;
  q.t = paths.front().t;
  q.probs = probs;
  const auto np = static_cast<Eigen::Index>(probs.size());
  q.V_star.resize(np, static_cast<Eigen::Index>(n));
  q.c_star.resize(np, static_cast<Eigen::Index>(n));
  q.pi1.resize(np, static_cast<Eigen::Index>(n));
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(paths.size()), c(paths.size()), pi(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
      v[i] = paths[i].V_star[k];
      c[i] = paths[i].c_star[k];
      pi[i] = paths[i].pi(0, static_cast<Eigen::Index>(k));
    }
    std::sort(v.begin(), v.end());
    std::sort(c.begin(), c.end());
    std::sort(pi.begin(), pi.end());
    for (Eigen::Index j = 0; j < np; ++j) {
      q.V_star(j, static_cast<Eigen::Index>(k)) = quantile_sorted(v, probs[j]);
      q.c_star(j, static_cast<Eigen::Index>(k)) = quantile_sorted(c, probs[j]);
      q.pi1(j, static_cast<Eigen::Index>(k)) = quantile_sorted(pi, probs[j]);
    }
  }
  return q;
}

SimulationSummary simulate_summary(const MergedPolicy& policy, int steps, int n_paths, std::uint64_t seed,
                                   const std::vector<double>& probs, int keep_paths, int max_quantile_points) {
  if (steps < 1 || n_paths < 1 || max_quantile_points < 2)
    throw Error(ErrorCode::Degenerate, "steps, n_paths and quantile points must be positive");
  const auto& p = policy.problem();
  const PolicySlices slices(policy, uniform_grid(p.horizon(), steps));
  int stride = 1;
  while (steps / stride + 1 > max_quantile_points) ++stride;
  while (steps % stride != 0) --stride;
  const std::size_t nq = static_cast<std::size_t>(steps / stride) + 1;
  const auto np = static_cast<std::size_t>(n_paths);
  std::vector<double> v(nq * np), c(nq * np), pi(nq * np);

  SimulationSummary out;
  out.paths = n_paths;
  out.stride = stride;
  constexpr int kBatch = 512;
  std::vector<PathRecord> batch;
  for (int first = 0; first < n_paths; first += kBatch) {
    const int count = std::min(kBatch, n_paths - first);
    batch.assign(static_cast<std::size_t>(count), PathRecord{});
    long bad = 0;
#pragma omp parallel for schedule(dynamic, 4) reduction(+ : bad)
    for (int j = 0; j < count; ++j) {
      const int i = first + j;
      const auto path = simulate_kernel_path(p.market, p.horizon(), steps, seed, static_cast<std::uint64_t>(i));
      batch[j] = record_path(policy, slices, path);
      const PathRecord& rec = batch[j];
      for (std::size_t k = 0; k < rec.size(); ++k)
        if (!(rec.V_star[k] > rec.F_t[k]) || !(rec.c_star[k] > (*p.cashflows.cbar)(rec.t[k]))) ++bad;
      for (std::size_t q = 0; q < nq; ++q) {
        const std::size_t k = q * static_cast<std::size_t>(stride);
        v[q * np + i] = rec.V_star[k];
        c[q * np + i] = rec.c_star[k];
        pi[q * np + i] = rec.pi(0, static_cast<Eigen::Index>(k));
      }
    }
    out.floor_violations += bad;
    for (int j = 0; j < count && static_cast<int>(out.kept.size()) < keep_paths; ++j)
      out.kept.push_back(std::move(batch[j]));
  }

  QuantileSummary& qs = out.quantiles;
  qs.probs = probs;
  qs.t.resize(nq);
  const auto npr = static_cast<Eigen::Index>(probs.size());
  qs.V_star.resize(npr, static_cast<Eigen::Index>(nq));
  qs.c_star.resize(npr, static_cast<Eigen::Index>(nq));
  qs.pi1.resize(npr, static_cast<Eigen::Index>(nq));
#pragma omp parallel for schedule(static)
  for (std::size_t q = 0; q < nq; ++q) {
    qs.t[q] = slices.grid()[q * static_cast<std::size_t>(stride)];
    const auto kq = static_cast<Eigen::Index>(q);
    for (auto [data, dst] : {std::pair{&v, &qs.V_star}, std::pair{&c, &qs.c_star}, std::pair{&pi, &qs.pi1}}) {
      const auto first = data->begin() + static_cast<std::ptrdiff_t>(q * np);
      std::vector<double> col(first, first + static_cast<std::ptrdiff_t>(np));
      std::sort(col.begin(), col.end());
      for (Eigen::Index j = 0; j < npr; ++j) (*dst)(j, kq) = quantile_sorted(col, probs[j]);
    }
  }
  return out;
}

void write_path_header(std::ostream& os, Eigen::Index assets, bool with_path) {
  if (with_path) os << "path,";
  os << "t,z";
  if (assets == 1)
    os << ",P";
  else
    for (Eigen::Index i = 0; i < assets; ++i) os << ",P_" << i + 1;
  os << ",c_star";
  for (Eigen::Index i = 0; i < assets; ++i) os << ",pi_" << i + 1;
  for (Eigen::Index i = 0; i < assets; ++i) os << ",exposure_" << i + 1;
  os << ",V_star,V1,V2,F_t\n";
}

void write_path_csv(std::ostream& os, const PathRecord& path, int path_index, bool header) {
  const auto assets = path.pi.rows();
  os << std::setprecision(12);
  if (header) write_path_header(os, assets, path_index >= 0);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    if (path_index >= 0) os << path_index << ',';
    os << path.t[k] << ',' << path.z[k];
    for (Eigen::Index i = 0; i < assets; ++i) os << ',' << path.prices(i, kk);
    os << ',' << path.c_star[k];
    for (Eigen::Index i = 0; i < assets; ++i) os << ',' << path.pi(i, kk);
    for (Eigen::Index i = 0; i < assets; ++i) os << ',' << path.exposure(i, kk);
    os << ',' << path.V_star[k] << ',' << path.V1[k] << ',' << path.V2[k] << ',' << path.F_t[k] << '\n';
  }
}

void write_expected_csv(std::ostream& os, const ExpectedCurves& curves) {
  const auto assets = curves.exposure.rows();
  os << std::setprecision(12) << "t,E_c_star,E_V_star";
  for (Eigen::Index i = 0; i < assets; ++i) os << ",E_exposure_" << i + 1;
  for (Eigen::Index i = 0; i < assets; ++i) os << ",estimator_" << i + 1;
  os << '\n';
  for (std::size_t k = 0; k < curves.t.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    os << curves.t[k] << ',' << curves.c_star[k] << ',' << curves.V_star[k];
    for (Eigen::Index i = 0; i < assets; ++i) os << ',' << curves.exposure(i, kk);
    for (Eigen::Index i = 0; i < assets; ++i) os << ',' << curves.estimator(i, kk);
    os << '\n';
  }
}

void write_quantile_csv(std::ostream& os, const QuantileSummary& q) {
  os << std::setprecision(12) << "t";
  for (const char* name : {"V_star", "c_star", "pi_1"})
    for (double pr : q.probs) os << ',' << name << "_q" << pr;
  os << '\n';
  for (std::size_t k = 0; k < q.t.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    os << q.t[k];
    for (const auto* mat : {&q.V_star, &q.c_star, &q.pi1})
      for (Eigen::Index j = 0; j < mat->rows(); ++j) os << ',' << (*mat)(j, kk);
    os << '\n';
  }
}

}  // namespace lifecycle
