#include "lifecycle/config.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lifecycle/errors.hpp"

namespace lifecycle {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path + ": " + what);
}

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

const json* child(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double number(const json& j, const std::string& path, const std::string& key, std::optional<double> fallback = {}) {
  const json* v = child(j, path, key);
  if (!v) {
    if (fallback) return *fallback;
    fail(join(path, key), "missing");
  }
  return as_number(*v, join(path, key));
}

int integer(const json& j, const std::string& path, const std::string& key, int fallback) {
  const json* v = child(j, path, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(join(path, key), "expected an integer");
  return v->get<int>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Scalars are accepted where a vector or 1x1 matrix is expected.
Eigen::VectorXd vector_field(const json& j, const std::string& path) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  const auto v = number_list(j, path);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_field(const json& j, const std::string& path) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) fail(path, "expected a number or an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const auto row = number_list(j[i], rp);
    if (i == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) fail(rp, "rows must have equal length");
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = row[c];
  }
  return m;
}

CurvePtr curve_field(const json& j, const std::string& path) {
  if (j.is_number()) return make_constant(j.get<double>());
  if (!j.is_object()) fail(path, "expected a number or a curve object");
  const json* type = child(j, path, "type");
  if (!type || !type->is_string()) fail(join(path, "type"), "expected one of exp, constant, scaled_exp, table");
  const auto kind = type->get<std::string>();
  if (kind == "exp") return make_exp(number(j, path, "x0"), number(j, path, "lam", 0.0));
  if (kind == "constant") return make_constant(number(j, path, "value"));
  if (kind == "scaled_exp") return make_scaled_exp(number(j, path, "annual"), number(j, path, "rate"));
  if (kind == "table") {
    const json* t = child(j, path, "t");
    const json* v = child(j, path, "v");
    if (!t) fail(join(path, "t"), "missing");
    if (!v) fail(join(path, "v"), "missing");
    try {
      return std::make_shared<TableCurve>(number_list(*t, join(path, "t")), number_list(*v, join(path, "v")));
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }
  fail(join(path, "type"), "unknown curve type '" + kind + "'");
}

double terminal_floor(const json& j, const std::string& path, const CurvePtr& income, double r, const QuadSpec& q) {
  if (j.is_number()) return j.get<double>();
  const json* a = child(j, path, "annuity");
  if (!a) fail(path, "expected a number or {\"annuity\": {...}}");
  const std::string ap = join(path, "annuity");
  const double rate = number(*a, ap, "rate", r);
  const double years = number(*a, ap, "years");
  const double replacement = number(*a, ap, "replacement_ratio");
  const double covered = number(*a, ap, "covered_fraction", 0.0);
  const double year = number(*a, ap, "reference_year");
  const double last_income = integrate([&](double t) { return (*income)(t); }, year, year + 1.0, q);
  return terminal_F_from_annuity(rate, years, replacement * (1.0 - covered) * last_income);
}

ModelVariant variant_field(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a variant name");
  try {
    return parse_variant(j.get<std::string>());
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("<root>", "expected an object");

  RunConfig cfg;
  cfg.hash = fnv1a_hex(text);

  const json* m = child(doc, "", "market");
  if (!m) fail("market", "missing");
  cfg.market.r = number(*m, "market", "r");
  for (const char* key : {"mu", "sigma", "p0"})
    if (!child(*m, "market", key)) fail(join("market", key), "missing");
  cfg.market.mu = vector_field(m->at("mu"), "market.mu");
  cfg.market.sigma = matrix_field(m->at("sigma"), "market.sigma");
  cfg.market.p0 = vector_field(m->at("p0"), "market.p0");

  cfg.horizon = number(doc, "", "horizon", 40.0);
  cfg.v0 = number(doc, "", "v0");

  if (const json* n = child(doc, "", "numerics")) {
    if (const json* q = child(*n, "numerics", "quad")) {
      cfg.quad.nodes = integer(*q, "numerics.quad", "nodes", cfg.quad.nodes);
      cfg.quad.panels = integer(*q, "numerics.quad", "panels", cfg.quad.panels);
    }
    if (const json* r = child(*n, "numerics", "root")) {
      cfg.root.abs_tol = number(*r, "numerics.root", "abs_tol", cfg.root.abs_tol);
      cfg.root.rel_tol = number(*r, "numerics.root", "rel_tol", cfg.root.rel_tol);
      cfg.root.max_iter = integer(*r, "numerics.root", "max_iter", cfg.root.max_iter);
    }
  }
  try {
    cfg.quad.validate();
  } catch (const Error& e) {
    fail("numerics.quad", e.what());
  }
  try {
    cfg.root.validate();
  } catch (const Error& e) {
    fail("numerics.root", e.what());
  }

  const json* c = child(doc, "", "cashflows");
  if (!c) fail("cashflows", "missing");
  const json* y = child(*c, "cashflows", "income");
  const json* cb = child(*c, "cashflows", "consumption_floor");
  const json* tf = child(*c, "cashflows", "terminal_floor");
  cfg.cashflows.y = y ? curve_field(*y, "cashflows.income") : make_constant(0.0);
  cfg.cashflows.cbar = cb ? curve_field(*cb, "cashflows.consumption_floor") : make_constant(0.0);
  cfg.cashflows.F = tf ? terminal_floor(*tf, "cashflows.terminal_floor", cfg.cashflows.y, cfg.market.r, cfg.quad) : 0.0;
  cfg.cashflows.T = cfg.horizon;

  const json* p = child(doc, "", "preferences");
  if (!p) fail("preferences", "missing");
  cfg.prefs.beta = number(*p, "preferences", "beta");
  cfg.prefs.a_hat = number(*p, "preferences", "a_hat", 1.0);
  if (const json* v = child(*p, "preferences", "variant")) {
    const ModelVariant variant = variant_field(*v, "preferences.variant");
    const CalibParams cp = published_params(variant);
    cfg.prefs_variant = variant;
    cfg.prefs.b_hat = cp.b_hat;
    cfg.prefs.a = make_exp(cp.a0, cp.lam_a);
    cfg.prefs.b = make_exp(cp.b0, cp.lam_b);
    if (variant == ModelVariant::CrraFull) {
      cfg.cashflows.cbar = make_constant(0.0);
      cfg.cashflows.F = 0.0;
    }
  }
  if (child(*p, "preferences", "b_hat")) cfg.prefs.b_hat = number(*p, "preferences", "b_hat");
  else if (!cfg.prefs_variant) fail("preferences.b_hat", "missing (or give preferences.variant)");
  for (const char* key : {"a", "b"}) {
    const std::string kp = join("preferences", key);
    const json* v = child(*p, "preferences", key);
    if (!v && !cfg.prefs_variant) fail(kp, "missing (or give preferences.variant)");
    if (v) (key[0] == 'a' ? cfg.prefs.a : cfg.prefs.b) = curve_field(*v, kp);
  }

  if (const json* mc = child(doc, "", "monte_carlo")) {
    cfg.mc.paths = integer(*mc, "monte_carlo", "paths", cfg.mc.paths);
    cfg.mc.steps = integer(*mc, "monte_carlo", "steps", cfg.mc.steps);
    cfg.mc.budget_paths = integer(*mc, "monte_carlo", "budget_paths", cfg.mc.budget_paths);
    if (cfg.mc.paths < 1) fail("monte_carlo.paths", "must be >= 1");
    if (cfg.mc.steps < 1) fail("monte_carlo.steps", "must be >= 1");
    if (cfg.mc.budget_paths < 2) fail("monte_carlo.budget_paths", "must be >= 2");
  }

  if (const json* cal = child(doc, "", "calibration")) {
    const std::string cp = "calibration";
    if (const json* v = child(*cal, cp, "variant")) cfg.calibration.variant = variant_field(*v, cp + ".variant");
    cfg.calibration.grid_points = integer(*cal, cp, "grid_points", cfg.calibration.grid_points);
    if (cfg.calibration.grid_points < 1) fail(cp + ".grid_points", "must be >= 1");
    auto& o = cfg.calibration.optimizer;
    o.starts = integer(*cal, cp, "starts", o.starts);
    if (o.starts < 1) fail(cp + ".starts", "must be >= 1");
    o.spread = number(*cal, cp, "spread", o.spread);
    if (!(o.spread >= 0.0 && o.spread < 1.0)) fail(cp + ".spread", "must lie in [0,1)");
    o.simplex_max_iter = integer(*cal, cp, "simplex_max_iter", o.simplex_max_iter);
    o.lm_max_evals = integer(*cal, cp, "lm_max_evals", o.lm_max_evals);
    if (const json* b = child(*cal, cp, "positive_b_branch")) {
      if (!b->is_boolean()) fail(cp + ".positive_b_branch", "expected true or false");
      o.positive_b_branch = b->get<bool>();
    }
    if (const json* t = child(*cal, cp, "target")) {
      const std::string tp = cp + ".target";
      const json* tc = child(*t, tp, "consumption");
      const json* ta = child(*t, tp, "allocation");
      if (!tc) fail(tp + ".consumption", "missing");
      if (!ta) fail(tp + ".allocation", "missing");
      cfg.calibration.consumption_target = curve_field(*tc, tp + ".consumption");
      cfg.calibration.allocation_target = curve_field(*ta, tp + ".allocation");
    }
  }

  if (const json* o = child(doc, "", "output_dir")) {
    if (!o->is_string()) fail("output_dir", "expected a string");
    cfg.output_dir = o->get<std::string>();
  }
  if (const json* s = child(doc, "", "seed")) {
    if (!s->is_number_unsigned()) fail("seed", "expected a non-negative integer");
    cfg.seed = s->get<std::uint64_t>();
  }
  cfg.calibration.optimizer.seed = cfg.seed;

  // Surface model-level violations with the section that caused them.
  try {
    Market::validate(cfg.market);
  } catch (const Error& e) {
    fail("market", e.what());
  }
  try {
    cfg.cashflows.validate();
  } catch (const Error& e) {
    fail("cashflows", e.what());
  }
  try {
    cfg.prefs.validate(cfg.horizon);
  } catch (const Error& e) {
    fail("preferences", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Problem RunConfig::problem() const { return Problem(Market::validate(market), prefs, cashflows, quad, root); }

CalibrationSetup RunConfig::calibration_setup() const {
  CalibrationSetup s;
  s.market = market;
  s.cashflows = cashflows;
  s.beta = prefs.beta;
  s.a_hat = prefs.a_hat;
  s.v0 = v0;
  s.quad = quad;
  s.root = root;
  return s;
}

CalibrationTarget RunConfig::calibration_target() const {
  if (!calibration.consumption_target)
    return target_curves_paper(horizon, calibration.grid_points);
  return make_target(*calibration.consumption_target, *calibration.allocation_target, horizon,
                     calibration.grid_points);
}

}  // namespace lifecycle
