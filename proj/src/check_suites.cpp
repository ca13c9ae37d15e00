#include "smoothcd/check_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>

#include "smoothcd/bregman.hpp"
#include "smoothcd/brute_force.hpp"
#include "smoothcd/errors.hpp"
#include "smoothcd/harness.hpp"
#include "smoothcd/rate_constants.hpp"
#include "smoothcd/rng.hpp"
#include "smoothcd/solvers.hpp"
#include "smoothcd/surrogate_check.hpp"

namespace smoothcd {

namespace {

using Clock = std::chrono::steady_clock;

VectorXd gaussian(Pcg32& rng, Eigen::Index n, double scale = 1.0) {
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

double unif(Pcg32& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

ProxOracle random_prox(ProxKind kind, int n, Pcg32& rng) {
  switch (kind) {
    case ProxKind::zero: return ProxOracle::zero();
    case ProxKind::l1: return ProxOracle::l1(unif(rng, 0.1, 2.0));
    case ProxKind::l2norm: return ProxOracle::l2norm(unif(rng, 0.1, 2.0));
    case ProxKind::group: {
      Groups g;
      std::vector<int> cur;
      for (int j = 0; j < n; ++j) {
        cur.push_back(j);
        if (rng.uniform() < 0.5 || j == n - 1) {
          g.push_back(cur);
          cur.clear();
        }
      }
      return ProxOracle::group(unif(rng, 0.1, 2.0), g);
    }
    case ProxKind::ball2: return ProxOracle::ball2(unif(rng, 0.3, 2.0), gaussian(rng, n));
    case ProxKind::ball1: return ProxOracle::ball1(unif(rng, 0.3, 2.0), gaussian(rng, n));
    case ProxKind::simplex: return ProxOracle::simplex(unif(rng, 0.5, 2.0));
    case ProxKind::hyperbox: {
      VectorXd a(n), lo(n), hi(n);
      for (int j = 0; j < n; ++j) {
        a[j] = unif(rng, 0.5, 1.5) * (rng.uniform() < 0.3 ? -1.0 : 1.0);
        lo[j] = -unif(rng, 0.0, 1.0);
        hi[j] = unif(rng, 0.5, 1.5);
      }
      const double theta = unif(rng, 0.2, 0.8);
      return ProxOracle::hyperbox(a, a.dot(lo + theta * (hi - lo)), lo, hi);
    }
    case ProxKind::affine: {
      const int rows = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(n - 1)));
      MatrixXd A(rows, n);
      for (int r = 0; r < rows; ++r)
        for (int j = 0; j < n; ++j) A(r, j) = rng.normal();
      return ProxOracle::affine_set(A, gaussian(rng, rows));
    }
    case ProxKind::tv1d: return ProxOracle::tv1d(unif(rng, 0.1, 2.0));
    case ProxKind::power: return ProxOracle::power_norm(unif(rng, 0.0, 3.0), unif(rng, 0.2, 2.0));
  }
  return ProxOracle::zero();
}

// Envelope F_gamma(x_k) - F* <= 2 L |x0 - x*|^2 / (k + 4) for deterministic one-block descent.
double envelope_violation(const SmoothSurrogate& s, const VectorXd& x0, const VectorXd& xstar, double fstar, int K) {
  const double L = s.lipschitz()[0];
  const double R2 = (x0 - xstar).squaredNorm();
  double worst = s.value_at(x0) - fstar - 2.0 * L * R2 / 4.0;
  SolverConfig cfg;
  cfg.max_epochs = K;
  cfg.grad_tol = 1e-300;
  cd_run(s, x0, cfg, [&](long k, int, const SurrogateState& st) {
    worst = std::max(worst, s.value(st) - fstar - 2.0 * L * R2 / (double(k) + 4.0));
  });
  return std::max(0.0, worst);
}

// Diagonal quadratic + l1 on a single block; the minimizer is a closed form.
GeneratedProblem one_block_instance(int n, Pcg32& rng) {
  VectorXd a(n), b(n), x0(n);
  for (int j = 0; j < n; ++j) a[j] = unif(rng, 0.5, 5.0);
  for (int j = 0; j < n; ++j) b[j] = 2.0 * rng.normal();
  for (int j = 0; j < n; ++j) x0[j] = 3.0 * rng.normal();
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < n; ++j) t.emplace_back(j, j, a[j]);
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  GeneratedProblem g;
  g.family = "one_block";
  g.composite = QuadraticComposite(Matrix(A), b, ProxOracle::l1(0.5), BlockPartition({n}));
  g.x0 = x0;
  return g;
}

double trace_distance(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) {
  if (a.size() != b.size()) return 1.0;
  for (size_t k = 0; k < a.size(); ++k)
    if (a[k].k != b[k].k || a[k].f_gamma != b[k].f_gamma || a[k].f_orig_at_B != b[k].f_orig_at_B ||
        a[k].grad_norm != b[k].grad_norm)
      return 1.0;
  return 0.0;
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.passed(); });
}

double SuiteResult::worst_ratio() const {
  const CheckLine* w = worst();
  return w ? (w->tol > 0.0 ? w->value / w->tol : (w->value > 0.0 ? INFINITY : 0.0)) : 0.0;
}

const CheckLine* SuiteResult::worst() const {
  const CheckLine* best = nullptr;
  double ratio = -1.0;
  for (const auto& c : checks) {
    const double r = c.tol > 0.0 ? c.value / c.tol : (c.value > 0.0 ? INFINITY : 0.0);
    if (r > ratio) {
      ratio = r;
      best = &c;
    }
  }
  return best;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prox", "smoothing", "solvers", "bregman"};
  return names;
}

VectorXd tv_prox_sign_pattern(const VectorXd& y, double lambda) {
  const int n = static_cast<int>(y.size());
  if (n < 1 || n > 8) throw ArgumentError("tv_prox_sign_pattern supports 1 <= n <= 8");
  if (n == 1) return y;
  auto objective = [&](const VectorXd& x) {
    double tv = 0.0;
    for (int j = 0; j + 1 < n; ++j) tv += std::abs(x[j + 1] - x[j]);
    return 0.5 * (x - y).squaredNorm() + lambda * tv;
  };
  const int m = n - 1;
  int patterns = 1;
  for (int j = 0; j < m; ++j) patterns *= 3;
  VectorXd best;
  double best_val = INFINITY;
  std::vector<int> s(m);
  for (int code = 0; code < patterns; ++code) {
    int c = code;
    for (int j = 0; j < m; ++j) {
      s[j] = c % 3 - 1;
      c /= 3;
    }
    // fused segments where s_j = 0; on each segment x = mean(y) - lambda (s_in - s_out) / len
    VectorXd x(n);
    int start = 0;
    while (start < n) {
      int end = start;
      while (end < m && s[end] == 0) ++end;
      const int len = end - start + 1;
      const double s_in = start > 0 ? s[start - 1] : 0.0;
      const double s_out = end < m ? s[end] : 0.0;
      const double v = y.segment(start, len).mean() - lambda * (s_in - s_out) / len;
      x.segment(start, len).setConstant(v);
      start = end + 1;
    }
    bool consistent = true;
    for (int j = 0; j < m && consistent; ++j) {
      const double d = x[j + 1] - x[j];
      if (s[j] != 0 && (d * s[j] <= 0.0)) consistent = false;
    }
    if (!consistent) continue;
    const double val = objective(x);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  }
  return best;
}

SuiteResult run_prox_suite(const SuiteOptions& opt) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "prox";
  Pcg32 rng(splitmix64(opt.seed), 101);
  for (ProxKind kind : {ProxKind::zero, ProxKind::l1, ProxKind::l2norm, ProxKind::group, ProxKind::ball2,
                        ProxKind::ball1, ProxKind::simplex, ProxKind::hyperbox, ProxKind::affine, ProxKind::tv1d,
                        ProxKind::power}) {
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int n = kind == ProxKind::affine ? 2 + static_cast<int>(rng.below(2)) : 1 + static_cast<int>(rng.below(3));
      const ProxOracle psi = random_prox(kind, n, rng);
      const double gamma = unif(rng, 0.2, 2.0);
      const VectorXd x = gaussian(rng, n, 2.0);
      const VectorXd p = psi.evaluate(gamma, x);
      const VectorXd q = brute_force_prox(psi, gamma, x);
      worst = std::max(worst, (p - q).lpNorm<Eigen::Infinity>());
    }
    r.checks.push_back({"brute_force/" + to_string(kind), worst, 1e-5});
  }
  double worst = 0.0;
  for (double lambda : {0.1, 0.5, 2.0}) {
    for (int code = 0; code < 81; ++code) {
      VectorXd y(4);
      int c = code;
      for (int j = 0; j < 4; ++j) {
        y[j] = c % 3 - 1.0;
        c /= 3;
      }
      const VectorXd p = prox_tv_1d(lambda, y);
      worst = std::max(worst, (p - tv_prox_sign_pattern(y, lambda)).lpNorm<Eigen::Infinity>());
    }
  }
  r.checks.push_back({"tv_sign_pattern", worst, 1e-12});
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

SuiteResult run_smoothing_suite(const SuiteOptions& opt) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "smoothing";
  struct Case {
    GeneratedProblem g;
    int trials, lipschitz_trials;
  };
  std::vector<Case> cases;
  cases.push_back({gen_quadratic_l1(50, 30, 0.5, opt.seed), 200, 1000});
  cases.push_back({gen_quadratic_l2(40, 20, 0.5, opt.seed + 1), 60, 300});
  cases.push_back({gen_quadratic_tv(20, 0.5, opt.seed + 2), 60, 300});
  for (const auto& c : cases) {
    for (const auto& name : smoothing_names()) {
      const SurrogatePtr s = make_surrogate(name, c.g.composite, default_gamma(name, c.g.composite));
      if (opt.lipschitz_scale != 1.0) s->scale_lipschitz(opt.lipschitz_scale);
      CheckOptions co;
      co.trials = c.trials;
      co.lipschitz_trials = c.lipschitz_trials;
      co.seed = opt.seed + 7;
      co.radius = 1.0;
      const CheckReport rep = surrogate_check(*s, co);
      const std::string prefix = c.g.family + "/" + name + "/";
      r.checks.push_back({prefix + "sandwich", rep.sandwich, 1e-8});
      r.checks.push_back({prefix + "gradient", rep.gradient, 1e-5});
      r.checks.push_back({prefix + "lipschitz", rep.lipschitz, 1e-8});
      r.checks.push_back({prefix + "cocoercivity", rep.cocoercivity, 1e-8});
      r.checks.push_back({prefix + "convexity", rep.convexity, 1e-8});
      r.checks.push_back({prefix + "cache", rep.cache, 1e-9});
    }
  }
  // envelopes of Moreau, FB and DR share the minimum value with F
  const GeneratedProblem id = gen_identity_l1(20, 0.5, opt.seed + 3);
  const ReferenceSolution ref = reference_solve(id.composite);
  for (const char* name : {"moreau", "fb", "dr"}) {
    const SurrogatePtr s = make_surrogate(name, id.composite, default_gamma(name, id.composite));
    VectorXd xs = ref.x;
    if (std::string(name) == "dr") xs = ref.x + s->gamma() * id.composite.smooth_grad(ref.x);
    r.checks.push_back({std::string("identity_l1/") + name + "/min_value", std::abs(s->value_at(xs) - ref.f), 1e-8});
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

SuiteResult run_solvers_suite(const SuiteOptions& opt) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "solvers";
  auto exact = [&](const std::string& name, double got, double want) {
    r.checks.push_back({"constants/" + name, std::abs(got - want), 0.0});
  };
  exact("restart_period(10,2,1,e^-2)", double(restart_period(10, 2.0, 1.0, std::exp(-2.0))), 55.0);
  exact("restart_period(1,2,4,1)", double(restart_period(1, 2.0, 4.0, 1.0)), 1.0);
  exact("restart_period(1,1,1,1,4)", double(restart_period(1, 1.0, 1.0, 1.0, 4.0)), 4.0);
  exact("me(q=2)", growth_constant_me(2.0, 1.0, 1.0), 0.5);
  r.checks.push_back({"constants/me(q=1,R=2)", std::abs(growth_constant_me(1.0, 1.0, 1.0, 2.0) - 1.0 / 9.0), 1e-15});
  exact("fb(q=2)", growth_constant_fb(2.0, 1.0, 0.5, 1.0, 1.0), 0.5);
  exact("ns(q=2)", growth_constant_ns(2.0, 1.0, 1.0), 0.25);
  exact("ns(q=1,R=2)", growth_constant_ns(1.0, 1.0, 1.0, 2.0), 0.5);
  exact("C1(1,2,2)", contraction_C1(1.0, 2.0, 2), 0.75);
  {
    const std::vector<long> want{5, 10, 5, 20, 5, 10, 5};
    r.checks.push_back({"constants/doubling_schedule(5,7)", doubling_schedule(5, 7) == want ? 0.0 : 1.0, 0.0});
    const AccdParams p1 = accd_step_params(0.0, 1.0, 1.0, 0.0);
    const AccdParams p2 = accd_step_params(1.0, 1.0, 1.0, 0.0);
    r.checks.push_back({"accd_step_params", std::max(std::abs(p1.a_next - 1.0), std::abs(p2.a_next - 0.5 * (1.0 + std::sqrt(5.0)))), 1e-15});
  }

  // deterministic one-block envelope for FB and Moreau
  Pcg32 rng(splitmix64(opt.seed), 202);
  double env = 0.0;
  for (int t = 0; t < 3; ++t) {
    const GeneratedProblem g = one_block_instance(10, rng);
    const ReferenceSolution ref = reference_solve(g.composite);
    for (const char* name : {"fb", "moreau"}) {
      const SurrogatePtr s = make_surrogate(name, g.composite, default_gamma(name, g.composite));
      if (opt.lipschitz_scale != 1.0) s->scale_lipschitz(opt.lipschitz_scale);
      env = std::max(env, envelope_violation(*s, g.x0, ref.x, ref.f, 1000));
    }
  }
  r.checks.push_back({"one_block_envelope", env, 1e-10});

  // per-step descent of coordinate descent, better-of-two restarts, determinism
  const GeneratedProblem g = gen_quadratic_l1(20, 15, 0.3, opt.seed + 5);
  double descent = 0.0, restart_mono = 0.0, determinism = 0.0;
  for (const auto& name : smoothing_names()) {
    const SurrogatePtr s = make_surrogate(name, g.composite, default_gamma(name, g.composite));
    if (opt.lipschitz_scale != 1.0) s->scale_lipschitz(opt.lipschitz_scale);
    SolverConfig cfg;
    cfg.max_epochs = 20;
    cfg.grad_tol = 1e-12;
    cfg.seed = opt.seed;
    double prev = s->value_at(g.x0);
    cd_run(*s, g.x0, cfg, [&](long, int, const SurrogateState& st) {
      const double v = s->value(st);
      descent = std::max(descent, (v - prev) / (1.0 + std::abs(prev)));
      prev = v;
    });
    const SolveResult a = restart_run(*s, g.x0, cfg, RestartSchedule::doubling(20));
    for (size_t k = 1; k < a.round_values.size(); ++k)
      restart_mono = std::max(restart_mono, a.round_values[k] - a.round_values[k - 1]);
    const SolveResult b1 = accd_run(*s, g.x0, cfg), b2 = accd_run(*s, g.x0, cfg);
    determinism = std::max(determinism, trace_distance(b1.trace, b2.trace));
  }
  r.checks.push_back({"cd_descent", std::max(0.0, descent), 1e-12});
  r.checks.push_back({"restart_better_of_two", restart_mono, 0.0});
  r.checks.push_back({"determinism", determinism, 0.0});
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

SuiteResult run_bregman_suite(const SuiteOptions& opt) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "bregman";
  r.checks.push_back({"sextic_root(1,0,4)", std::abs(sextic_root(1.0, 0.0, 4.0) - 1.0), 1e-12});
  Pcg32 rng(splitmix64(opt.seed), 303);
  double sextic = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double a = std::pow(10.0, unif(rng, -2.0, 2.0));
    const double b = a * std::pow(10.0, unif(rng, -3.0, 2.0));
    const double c = std::pow(10.0, unif(rng, -3.0, 3.0));
    const double al = sextic_root(a, b, c);
    const double s = al * al;
    const double scale = a * s * s * s + std::abs(2 * a - b) * s * s + std::abs(a - 2 * b) * s + c;
    sextic = std::max(sextic, std::abs(sextic_value(a, b, c, al)) / scale);
  }
  r.checks.push_back({"sextic_residual", sextic, 1e-10});

  const QuarticProblem q = gen_quartic(10, 8, opt.seed);
  const PowerKernel phi(4.0, q.n());
  double cert = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const VectorXd x = gaussian(rng, q.n(), std::pow(10.0, unif(rng, -1.0, 0.7)));
    const int i = static_cast<int>(rng.below(q.n()));
    const VectorXd d = gaussian(rng, 1, std::pow(10.0, unif(rng, -2.0, 0.7)));
    VectorXd y = x;
    y[i] += d[0];
    const double fx = q.value(x);
    const double rhs = fx + q.coord_grad(i, x).dot(d) + opt.lipschitz_scale * q.lipschitz()[i] * phi.coord_bregman(x, i, d);
    cert = std::max(cert, (q.value(y) - rhs) / (1.0 + std::abs(fx)));
  }
  r.checks.push_back({"relative_smoothness", std::max(0.0, cert), 1e-10});

  double descent = 0.0, stationarity = 0.0;
  for (int seed = 0; seed < 2; ++seed) {
    SolverConfig cfg;
    cfg.max_epochs = 200;
    cfg.grad_tol = 1e-300;
    cfg.seed = opt.seed + seed;
    RrcdOptions ro;
    ro.check_descent = true;
    const RrcdResult res = rrcd_run(q, phi, gaussian(rng, q.n()), cfg, ro, opt.lipschitz_scale * q.lipschitz());
    descent = std::max(descent, res.max_descent_violation);
    stationarity = std::max(stationarity, res.max_stationarity);
  }
  r.checks.push_back({"rrcd_descent", descent, 1e-12});
  r.checks.push_back({"rrcd_stationarity", stationarity, 1e-8});
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
  if (name == "prox") return run_prox_suite(opt);
  if (name == "smoothing") return run_smoothing_suite(opt);
  if (name == "solvers") return run_solvers_suite(opt);
  if (name == "bregman") return run_bregman_suite(opt);
  throw ArgumentError("unknown suite '" + name + "' (valid: prox, smoothing, solvers, bregman)");
}

void print_suite(std::ostream& os, const SuiteResult& r, bool verbose) {
  const CheckLine* w = r.worst();
  os << std::left << std::setw(10) << r.name << (r.passed() ? "PASS" : "FAIL") << "  checks=" << r.checks.size();
  if (w) os << std::setprecision(3) << "  max violation " << w->value << " (" << w->name << ", tol " << w->tol << ")";
  os << std::setprecision(3) << "  " << r.seconds << " s\n";
  for (const auto& c : r.checks) {
    if (!verbose && c.passed()) continue;
    os << "    " << (c.passed() ? "pass " : "FAIL ") << c.name << "  " << c.value << " (tol " << c.tol << ")\n";
  }
}

}  // namespace smoothcd
