#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "smoothcd/bregman.hpp"
#include "smoothcd/check_suites.hpp"
#include "smoothcd/errors.hpp"
#include "smoothcd/experiment.hpp"
#include "smoothcd/harness.hpp"
#include "smoothcd/io.hpp"
#include "smoothcd/rate_constants.hpp"

using namespace smoothcd;

namespace {

struct SolveArgs {
  std::string config;
  std::optional<double> gamma, alpha, tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::string out = "trace.csv";
};

int cmd_solve(const SolveArgs& a) {
  const std::filesystem::path cfg_path = a.config;
  RunConfig rc = run_config_from_json(read_json_file(cfg_path), cfg_path.parent_path());
  if (a.gamma) rc.gamma = *a.gamma;
  if (a.alpha) rc.solver_cfg.alpha = *a.alpha;
  if (a.tol) rc.solver_cfg.grad_tol = *a.tol;
  if (a.seed) rc.solver_cfg.seed = *a.seed;
  if (a.epochs) rc.solver_cfg.max_epochs = *a.epochs;
  rc.solver_cfg.validate();
  if (rc.problem_path.empty()) throw ConfigurationError("config: missing key 'problem'");
  const LoadedProblem lp = problem_from_json(read_json_file(rc.problem_path));
  const VectorXd x0 = lp.x0 ? *lp.x0 : VectorXd::Zero(lp.n());

  SolveResult res;
  std::string label;
  double f_gamma = 0.0, f_orig = 0.0, grad = 0.0;
  if (rc.solver == "rrcd") {
    if (!lp.quartic) throw ConfigurationError("solver rrcd needs a problem of kind 'quartic'");
    const KernelPtr kernel = kernel_from_json(rc.kernel, lp.quartic->partition());
    res = rrcd_run(*lp.quartic, *kernel, x0, rc.solver_cfg);
    label = std::string("rrcd/") + kernel->name();
  } else {
    if (!lp.composite) throw ConfigurationError("solver " + rc.solver + " needs a composite problem");
    check_smoothing_name(rc.smoothing);
    const double gamma = rc.gamma ? *rc.gamma : default_gamma(rc.smoothing, *lp.composite, rc.gamma_eps);
    const SurrogatePtr s = make_surrogate(rc.smoothing, *lp.composite, gamma);
    if (rc.solver == "cd")
      res = cd_run(*s, x0, rc.solver_cfg);
    else if (rc.solver == "accd")
      res = accd_run(*s, x0, rc.solver_cfg);
    else
      res = restart_run(*s, x0, rc.solver_cfg, rc.restart, rc.max_rounds);
    label = rc.smoothing + "/" + rc.solver + (res.inexact_prox ? " (inexact-prox)" : "");
  }
  if (!res.trace.empty()) {
    f_gamma = res.trace.back().f_gamma;
    f_orig = res.trace.back().f_orig_at_B;
    grad = res.trace.back().grad_norm;
  }
  std::ofstream f(a.out);
  write_trace_csv(f, res.trace);
  if (!f) throw std::runtime_error("cannot write trace to '" + a.out + "'");
  std::cout << std::setprecision(12) << label << "\n"
            << "F_gamma      " << f_gamma << "\n"
            << "F(B(x))      " << f_orig << "\n"
            << "|grad|       " << grad << "\n"
            << "epochs       " << res.epochs << "\n"
            << "converged    " << (res.converged ? "yes" : "no") << "\n"
            << "trace        " << a.out << "\n";
  return 0;
}

int cmd_bench(const std::string& spec_path, const std::optional<std::string>& out) {
  ExperimentSpec spec = experiment_spec_from_json(read_json_file(spec_path));
  if (out) spec.output = *out;
  const ExperimentResult res = run_experiment(spec);
  for (const auto& g : res.summary["groups"]) {
    std::cout << std::left << std::setw(8) << g["smoothing"].get<std::string>() << std::setw(9)
              << g["solver"].get<std::string>() << " success " << g["success_rate"] << "  median epochs "
              << g["median_epochs_to_tol"] << "\n";
  }
  int failed = 0;
  for (const auto& r : res.runs)
    if (!r.ok) {
      ++failed;
      std::cerr << "run " << r.smoothing << "/" << r.solver << " seed " << r.seed << " failed: " << r.error << "\n";
    }
  std::cout << "summary      " << (std::filesystem::path(spec.output) / "summary.json").string() << "\n";
  return failed ? 1 : 0;
}

int cmd_check(const std::vector<std::string>& suites, bool verbose, double scale, std::uint64_t seed) {
  SuiteOptions opt;
  opt.lipschitz_scale = scale;
  opt.seed = seed;
  bool all = true;
  for (const auto& name : suites.empty() ? suite_names() : suites) {
    const SuiteResult r = run_suite(name, opt);
    print_suite(std::cout, r, verbose);
    all = all && r.passed();
  }
  return all ? 0 : 1;
}

struct ConstArgs {
  int N = 10;
  double q = 2.0, kappa = 1.0, alpha = std::exp(-2.0), delta0 = 0.0;
  double gamma = 1.0, L = 0.0, L_max = 1.0, R = 0.0;
  long K0 = 5;
  int count = 7;
};

int cmd_constants(const ConstArgs& a) {
  std::cout << std::setprecision(12);
  const std::optional<double> R = a.R > 0.0 ? std::optional<double>(a.R) : std::nullopt;
  const double me = growth_constant_me(a.q, a.kappa, a.gamma, a.R);
  std::cout << "kappa_hat moreau        " << me << "\n";
  if (a.gamma * a.L < 1.0)
    std::cout << "kappa_hat fb            " << growth_constant_fb(a.q, a.kappa, a.gamma, a.L, a.L_max, a.R) << "\n";
  else
    std::cout << "kappa_hat fb            n/a (gamma * L >= 1)\n";
  std::cout << "kappa_hat ns            " << growth_constant_ns(a.q, a.kappa, a.L_max, R) << "\n";
  std::cout << "restart_period          " << restart_period(a.N, a.q, a.kappa, a.alpha, a.delta0) << "\n";
  std::cout << "C1                      " << contraction_C1(a.kappa, a.q, a.N, a.delta0 > 0.0 ? a.delta0 : 1.0) << "\n";
  std::cout << "doubling_schedule       [";
  const auto sched = doubling_schedule(a.K0, a.count);
  for (size_t k = 0; k < sched.size(); ++k) std::cout << (k ? "," : "") << sched[k];
  std::cout << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinate descent on smooth approximations of nonsmooth convex problems"};
  app.require_subcommand(1);
  app.get_formatter()->column_width(34);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Run one solver on a problem described by a run config");
  solve->add_option("config", sa.config, "Run config JSON (references the problem JSON)")->required();
  solve->add_option("--gamma", sa.gamma, "Smoothing parameter (default: per-smoothing rule)");
  solve->add_option("--alpha", sa.alpha, "Sampling exponent in [0, 1] (default 0)");
  solve->add_option("--seed", sa.seed, "RNG seed (default 0)");
  solve->add_option("--tol", sa.tol, "Stop when the surrogate gradient norm is below this (default 0.1)");
  solve->add_option("--epochs", sa.epochs, "Epoch budget (default 1000)");
  solve->add_option("--out", sa.out, "Trace CSV path")->capture_default_str();

  std::string spec_path;
  std::optional<std::string> bench_out;
  auto* bench = app.add_subcommand("bench", "Run an experiment grid and write traces plus summary.json");
  bench->add_option("spec", spec_path, "Experiment spec JSON")->required();
  bench->add_option("--out", bench_out, "Output directory (overrides the spec)");

  std::vector<std::string> suites;
  bool verbose = false;
  double scale = 1.0;
  std::uint64_t check_seed = 2024;
  auto* check = app.add_subcommand("check", "Run the invariant suites (prox, smoothing, solvers, bregman)");
  check->add_option("--suite", suites, "Run only these suites")->check(CLI::IsMember(suite_names()));
  check->add_flag("--verbose,-v", verbose, "List every check, not only failures");
  check->add_option("--seed", check_seed, "Seed for the sampled instances")->capture_default_str();
  check->add_option("--scale-lipschitz", scale, "Multiply published Lipschitz constants (mutation testing)")
      ->group("");

  ConstArgs ca;
  auto* constants = app.add_subcommand("constants", "Print growth constants, restart period and schedule");
  constants->add_option("--N", ca.N, "Number of blocks")->capture_default_str();
  constants->add_option("--q", ca.q, "Growth exponent q in [1, 2]")->capture_default_str();
  constants->add_option("--kappa", ca.kappa, "Growth constant (of F, or kappa_bar for the restart period)")
      ->capture_default_str();
  constants->add_option("--alpha", ca.alpha, "Restart contraction target in (0, 1]")->capture_default_str();
  constants->add_option("--delta0", ca.delta0, "Initial gap F(x0) - F*")->capture_default_str();
  constants->add_option("--gamma", ca.gamma, "Smoothing parameter")->capture_default_str();
  constants->add_option("--L", ca.L, "Lipschitz constant of the smooth part (fb)")->capture_default_str();
  constants->add_option("--L-max", ca.L_max, "Largest coordinate Lipschitz constant")->capture_default_str();
  constants->add_option("--R", ca.R, "Distance bound to the solution set (q < 2; 0 = none)")->capture_default_str();
  constants->add_option("--K0", ca.K0, "First restart period")->capture_default_str();
  constants->add_option("--count", ca.count, "Schedule length")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return cmd_solve(sa);
    if (*bench) return cmd_bench(spec_path, bench_out);
    if (*check) return cmd_check(suites, verbose, scale, check_seed);
    if (*constants) return cmd_constants(ca);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
