#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "lifecycle/calibration.hpp"
#include "lifecycle/config.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/merge.hpp"
#include "lifecycle/simulation.hpp"
#include "lifecycle/validation.hpp"

namespace fs = std::filesystem;
using namespace lifecycle;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitScenario = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> variant;
  std::optional<int> paths;
  std::optional<int> steps;
  std::string scenario;
  int keep_paths = 10;
  double perturb_lambda = 1.0;
};

struct Context {
  RunConfig cfg;
  fs::path out;
  std::string header;
};

Context prepare(const Options& o) {
  Context ctx{load_config(o.config), {}, {}};
  if (o.seed) ctx.cfg.seed = *o.seed;
  ctx.cfg.calibration.optimizer.seed = ctx.cfg.seed;
  if (o.out) ctx.cfg.output_dir = *o.out;
  if (o.paths) ctx.cfg.mc.paths = *o.paths;
  if (o.steps) ctx.cfg.mc.steps = *o.steps;
  if (ctx.cfg.mc.paths < 1 || ctx.cfg.mc.steps < 1)
    throw Error(ErrorCode::ConfigError, "--paths and --steps must be >= 1");
  if (o.variant) ctx.cfg.calibration.variant = parse_variant(*o.variant);
  ctx.out = ctx.cfg.output_dir;
  fs::create_directories(ctx.out);
  ctx.header = "# config_hash=" + ctx.cfg.hash + " seed=" + std::to_string(ctx.cfg.seed) + "\n";
  return ctx;
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + p.string() + "'");
  return f;
}

MergedPolicy solve_or_explain(const Problem& p, double v0) {
  const double F0 = floor_F(p, 0.0);
  if (!(v0 > F0)) {
    std::ostringstream msg;
    msg << std::setprecision(12) << "endowment v0=" << v0 << " must exceed F(0)=" << F0
        << " (F1(0)=" << floor_F1(p, 0.0) << ", F2(0)=" << floor_F2(p, 0.0) << ")";
    throw Error(ErrorCode::InfeasibleEndowment, msg.str());
  }
  return solve_split(p, v0);
}

int cmd_solve(const Options& o) {
  const Context ctx = prepare(o);
  const Problem p = ctx.cfg.problem();
  const MergedPolicy policy = solve_or_explain(p, ctx.cfg.v0);
  const PolicyState s0 = policy_at(policy, 0.0, 1.0);

  nlohmann::ordered_json j;
  j["config_hash"] = ctx.cfg.hash;
  j["seed"] = ctx.cfg.seed;
  j["v0"] = policy.v0();
  j["v1_star"] = policy.v1_star();
  j["v2_star"] = policy.v2_star();
  j["lambda1_star"] = policy.lambda1_star();
  j["lambda2_star"] = policy.terminal().lambda2();
  j["F_0"] = floor_F(p, 0.0);
  j["F1_0"] = floor_F1(p, 0.0);
  j["F2_0"] = floor_F2(p, 0.0);
  j["F_T"] = p.cashflows.F;
  j["value_V1"] = value_V1(p, policy.v1_star()).value;
  j["value_V2"] = value_V2(p, policy.v2_star()).value;
  j["c_star_0"] = s0.c_star;
  j["pi_star_0"] = std::vector<double>(s0.pi_star.data(), s0.pi_star.data() + s0.pi_star.size());
  j["t_tilde_0"] = s0.t_tilde;
  j["nonmonotone_split_evals"] = policy.nonmonotone_split_evals;
  {
    auto f = open_output(ctx.out / "solve.json");
    f << j.dump(2) << '\n';
  }
  {
    auto f = open_output(ctx.out / "expected.csv");
    f << ctx.header;
    write_expected_csv(f, expected_curves(policy, uniform_grid(p.horizon(), ctx.cfg.mc.steps)));
  }
  std::cout << std::setprecision(10) << "v1*=" << policy.v1_star() << " v2*=" << policy.v2_star()
            << " lambda1*=" << policy.lambda1_star() << " F(0)=" << floor_F(p, 0.0) << " F1(0)=" << floor_F1(p, 0.0)
            << " F2(0)=" << floor_F2(p, 0.0) << "\nwrote " << (ctx.out / "solve.json").string() << " and "
            << (ctx.out / "expected.csv").string() << '\n';
  return 0;
}

std::pair<std::vector<double>, std::vector<double>> read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ScenarioParse, "cannot open scenario file '" + path + "'");
  std::string line;
  int lineno = 0;
  bool header = false;
  std::vector<double> t, price;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "t,price") throw Error(ErrorCode::ScenarioParse, "line " + std::to_string(lineno) + ": expected header 't,price'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double tv = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument("trailing characters");
      const double pv = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument("trailing characters");
      t.push_back(tv);
      price.push_back(pv);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ScenarioParse, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header || t.empty()) throw Error(ErrorCode::ScenarioParse, "scenario file has no data rows");
  return {t, price};
}

int cmd_simulate(const Options& o) {
  const Context ctx = prepare(o);
  const Problem p = ctx.cfg.problem();
  const MergedPolicy policy = solve_or_explain(p, ctx.cfg.v0);

  if (!o.scenario.empty()) {
    const auto [t, price] = read_scenario(o.scenario);
    const PathRecord rec = replay_scenario(policy, t, price);
    auto f = open_output(ctx.out / "scenario.csv");
    f << ctx.header;
    write_path_csv(f, rec);
    std::cout << "replayed " << rec.size() << " points; wrote " << (ctx.out / "scenario.csv").string() << '\n';
    return 0;
  }

  const std::vector<double> probs{0.05, 0.25, 0.5, 0.75, 0.95};
  const SimulationSummary sum =
      simulate_summary(policy, ctx.cfg.mc.steps, ctx.cfg.mc.paths, ctx.cfg.seed, probs, o.keep_paths);
  {
    auto f = open_output(ctx.out / "paths.csv");
    f << ctx.header;
    write_path_header(f, p.market.assets(), true);
    for (std::size_t i = 0; i < sum.kept.size(); ++i) write_path_csv(f, sum.kept[i], static_cast<int>(i), false);
  }
  {
    auto f = open_output(ctx.out / "quantiles.csv");
    f << ctx.header;
    write_quantile_csv(f, sum.quantiles);
  }
  std::cout << "simulated " << sum.paths << " paths x " << ctx.cfg.mc.steps << " steps; floor violations "
            << sum.floor_violations << "; wrote " << sum.kept.size() << " paths to "
            << (ctx.out / "paths.csv").string() << " and quantiles to " << (ctx.out / "quantiles.csv").string()
            << '\n';
  return sum.floor_violations == 0 ? 0 : kExitFailure;
}

int cmd_calibrate(const Options& o) {
  const Context ctx = prepare(o);
  const auto& cal = ctx.cfg.calibration;
  const CalibrationSetup setup = ctx.cfg.calibration_setup();
  const CalibrationTarget target = ctx.cfg.calibration_target();
  const CalibrationResult res = fit(cal.variant, target, setup, published_params(cal.variant), cal.optimizer);
  const std::string stem = "calibration_" + std::string(variant_name(cal.variant));
  {
    auto f = open_output(ctx.out / (stem + ".json"));
    write_calibration_json(f, res, ctx.cfg.hash, ctx.cfg.seed);
  }
  {
    auto f = open_output(ctx.out / (stem + ".csv"));
    f << ctx.header;
    write_calibration_csv(f, ResidualEvaluator(setup, cal.variant, target).curves(res.params));
  }
  std::cout << std::setprecision(8) << variant_name(cal.variant) << " ssrd=" << res.ssrd << " b_hat=" << res.params.b_hat
            << " a0=" << res.params.a0 << " lam_a=" << res.params.lam_a << " b0=" << res.params.b0
            << " lam_b=" << res.params.lam_b << " converged=" << (res.converged ? "true" : "false")
            << " evaluations=" << res.iterations << '\n';
  return 0;
}

int cmd_validate(const Options& o) {
  const Context ctx = prepare(o);
  const Problem p = ctx.cfg.problem();
  solve_or_explain(p, ctx.cfg.v0);
  ValidationOptions vo;
  vo.budget_paths = ctx.cfg.mc.budget_paths;
  vo.budget_steps = ctx.cfg.mc.steps;
  vo.floor_paths = ctx.cfg.mc.paths;
  vo.floor_steps = ctx.cfg.mc.steps;
  vo.lambda_scale = o.perturb_lambda;
  vo.seed = ctx.cfg.seed;
  const auto results = run_validation(p, ctx.cfg.v0, vo);
  std::ostringstream report;
  report << ctx.header;
  bool ok = true;
  for (const auto& r : results) {
    report << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  std::cout << report.str();
  auto f = open_output(ctx.out / "validation.txt");
  f << report.str();
  return ok ? 0 : kExitFailure;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InfeasibleEndowment:
    case ErrorCode::InfeasibleBudget:
    case ErrorCode::InfeasibleParams:
    case ErrorCode::InvalidPreferences:
    case ErrorCode::BadDimension:
    case ErrorCode::NonPositiveDefinite:
    case ErrorCode::DriftBelowRiskFree:
    case ErrorCode::MultiAssetUnsupported:
      return kExitConfig;
    case ErrorCode::ScenarioParse:
    case ErrorCode::NonPositivePrice:
      return kExitScenario;
    default:
      return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Life-cycle consumption and investment under age-dependent HARA preferences"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Random seed (overrides the config)");
  app.add_option("--out", o.out, "Output directory (overrides the config)");

  auto* solve = app.add_subcommand("solve", "Solve the budget split and write expected curves");
  auto* simulate = app.add_subcommand("simulate", "Simulate policy paths or replay a price scenario");
  simulate->add_option("--paths", o.paths, "Number of Monte Carlo paths");
  simulate->add_option("--steps", o.steps, "Time steps over the horizon");
  simulate->add_option("--scenario", o.scenario, "CSV with columns t,price");
  simulate->add_option("--write-paths", o.keep_paths, "Full paths written to paths.csv")->check(CLI::NonNegativeNumber);
  auto* calibrate = app.add_subcommand("calibrate", "Fit preference parameters to the target curves");
  calibrate->add_option("--variant", o.variant, "FULL, A_CONST, B_CONST, BOTH_CONST or CRRA_FULL");
  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  validate->add_option("--paths", o.paths, "Paths for the floor scan");
  validate->add_option("--steps", o.steps, "Time steps over the horizon");
  validate->add_option("--perturb-lambda", o.perturb_lambda)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (calibrate->parsed()) return cmd_calibrate(o);
    if (validate->parsed()) return cmd_validate(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
