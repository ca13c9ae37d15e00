// One pass/fail line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "smoothcd/bregman.hpp"
#include "smoothcd/check_suites.hpp"
#include "smoothcd/experiment.hpp"
#include "smoothcd/harness.hpp"
#include "smoothcd/rate_constants.hpp"
#include "smoothcd/rng.hpp"
#include "smoothcd/solvers.hpp"

using namespace smoothcd;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s  [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

VectorXd gaussian(Pcg32& rng, int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// F(x) = 1/2 x'Ax + b'x + lambda |x|_1 evaluated from dense data
struct DenseL1 {
  MatrixXd A;
  VectorXd b;
  double lambda;
  double operator()(const VectorXd& x) const { return 0.5 * x.dot(A * x) + b.dot(x) + lambda * x.lpNorm<1>(); }
};

struct Instance {
  GeneratedProblem g;
  DenseL1 F;
  std::vector<SurrogatePtr> surrogates;
};

Instance l1_instance() {
  Instance in;
  in.g = gen_quadratic_l1(50, 30, 0.5, 314);
  in.F = DenseL1{in.g.composite.A.dense(), in.g.composite.b, 0.5};
  for (const auto& name : smoothing_names()) {
    const double gamma = default_gamma(name, in.g.composite);
    in.surrogates.push_back(make_surrogate(name, in.g.composite, gamma));
  }
  return in;
}

void criterion_sandwich(const Instance& in) {
  const auto t0 = Clock::now();
  Pcg32 rng(101, 1);
  double worst = 0.0;
  for (const auto& s : in.surrogates) {
    for (int t = 0; t < 200; ++t) {
      const VectorXd x = 2.0 * gaussian(rng, s->n());
      const SurrogateState st = s->make_state(x);
      const double fg = s->value(st);
      const double lower = in.F(s->map_B(st)) - s->gamma() * s->gap_D();
      const double upper = in.F(s->map_C(st));
      worst = std::max({worst, (lower - fg) / (1.0 + std::abs(fg)), (fg - upper) / (1.0 + std::abs(fg))});
    }
  }
  const double secs = seconds_since(t0);
  report(1, "sandwich bounds, 4 smoothings x 200 points", worst <= 1e-8 && secs < 10.0,
         fmt("max violation %.2e <= 1e-8, %.2f s < 10 s", worst, secs));
}

void criterion_gradient(const Instance& in) {
  const auto t0 = Clock::now();
  Pcg32 rng(202, 1);
  double worst = 0.0;
  for (const auto& s : in.surrogates) {
    for (int t = 0; t < 100; ++t) {
      const VectorXd x = 2.0 * gaussian(rng, s->n());
      const int i = static_cast<int>(rng.below(s->blocks()));
      const double g = s->coord_grad_at(i, x)[0];
      const double h = 1e-6 * (1.0 + std::abs(x[i]));
      VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (s->value_at(xp) - s->value_at(xm)) / (2.0 * h);
      worst = std::max(worst, std::abs(g - fd) / (1.0 + std::abs(g)));
    }
  }
  const double secs = seconds_since(t0);
  report(2, "coordinate gradients vs central differences", worst <= 1e-5 && secs < 10.0,
         fmt("max rel error %.2e <= 1e-5, %.2f s < 10 s", worst, secs));
}

void criterion_lipschitz(const Instance& in) {
  const auto t0 = Clock::now();
  Pcg32 rng(303, 1);
  double lip = 0.0, coco = 0.0;
  for (const auto& s : in.surrogates) {
    for (int t = 0; t < 1000; ++t) {
      const VectorXd x = 2.0 * gaussian(rng, s->n());
      const int i = static_cast<int>(rng.below(s->blocks()));
      VectorXd h(1);
      h[0] = rng.normal() * std::pow(10.0, -4.0 * rng.uniform());
      if (h[0] == 0.0) continue;
      SurrogateState st = s->make_state(x);
      const double a = s->coord_grad(i, st)[0];
      s->apply_step(st, i, h);
      // fresh state so that the check does not rely on the incremental caches
      const double b = s->coord_grad_at(i, st.x)[0];
      const double Li = s->coord_lipschitz(i);
      const double dg = b - a;
      lip = std::max(lip, (std::abs(dg) - Li * std::abs(h[0])) / (Li * std::abs(h[0])));
      if (dg != 0.0) coco = std::max(coco, (dg * dg / Li - dg * h[0]) / std::abs(dg * h[0]));
    }
  }
  const double secs = seconds_since(t0);
  report(3, "block Lipschitz and cocoercivity, 1e3 samples each", lip <= 1e-8 && coco <= 1e-8 && secs < 30.0,
         fmt("lipschitz %.2e, cocoercivity %.2e <= 1e-8, %.2f s < 30 s", lip, coco, secs));
}

void criterion_envelope() {
  double worst = -1e300;
  std::string detail;
  // diagonal A keeps the Moreau prox exact; the dense instance exercises FB and DR
  Pcg32 rng(404, 1);
  const int n = 30;
  VectorXd d(n);
  for (int j = 0; j < n; ++j) d[j] = 0.05 + rng.uniform();
  const VectorXd c = gaussian(rng, n);
  const QuadraticComposite diag(Matrix(MatrixXd(d.asDiagonal())), -d.cwiseProduct(c), ProxOracle::l1(0.3),
                                BlockPartition({n}));
  GeneratedProblem dense = gen_quadratic_l1(n, 20, 0.3, 405);
  const QuadraticComposite dn(dense.composite.A, dense.composite.b, dense.composite.psi, BlockPartition({n}));

  struct Case {
    const QuadraticComposite* p;
    std::string smoothing;
  };
  const std::vector<Case> cases{{&diag, "moreau"}, {&diag, "fb"}, {&dn, "fb"}, {&dn, "dr"}};
  int runs = 0;
  for (const auto& cs : cases) {
    const ReferenceSolution ref = reference_solve(*cs.p, 1e-12);
    auto s = make_surrogate(cs.smoothing, *cs.p, default_gamma(cs.smoothing, *cs.p));
    // minimizer of the envelope: x* itself for Moreau and FB, x* + gamma grad f(x*) for DR
    VectorXd xs = ref.x;
    if (cs.smoothing == "dr") xs = ref.x + s->gamma() * cs.p->smooth_grad(ref.x);
    const double fstar = s->value_at(xs);
    const VectorXd x0 = 3.0 * gaussian(rng, n);
    const double bound0 = 2.0 * s->coord_lipschitz(0) * (x0 - xs).squaredNorm();
    SolverConfig cfg;
    cfg.max_epochs = 1000;
    cfg.grad_tol = 1e-300;
    cfg.seed = 7;
    long k = 0;
    SurrogateState start = s->make_state(x0);
    worst = std::max(worst, s->value(start) - fstar - bound0 / 4.0);
    const SolveResult res = cd_run(*s, x0, cfg, [&](long kk, int, const SurrogateState& st) {
      k = kk;
      const double gap = s->value(st) - fstar;
      worst = std::max(worst, gap - bound0 / double(kk + 4));
    });
    // an exactly stationary iterate ends the run early; later iterates would all equal it
    runs += (k == 1000 || res.trace.back().grad_norm == 0.0) ? 1 : 0;
  }
  report(4, "one-block envelope F_g(x_k) - F_g* <= 2 L R^2 / (k + 4), k <= 1000", worst <= 1e-10 && runs == 4,
         fmt("max (gap - bound) %.2e <= 1e-10 over %.0f runs", worst, runs));
}

// B = I, psi = lambda |x|_1, c ~ N(0, I): x* = soft(c, lambda)
struct IdentityCase {
  GeneratedProblem g;
  VectorXd xs;
  double fstar;
};

IdentityCase identity_case(std::uint64_t seed) {
  IdentityCase ic;
  ic.g = gen_identity_l1(20, 0.5, seed);
  const VectorXd c = -ic.g.composite.b;
  ic.xs = c.unaryExpr([](double v) { return std::copysign(std::max(std::abs(v) - 0.5, 0.0), v); });
  ic.fstar = 0.5 * ic.xs.squaredNorm() - c.dot(ic.xs) + 0.5 * ic.xs.lpNorm<1>();
  return ic;
}

void criterion_contraction() {
  const double kappa_bar = growth_constant_fb(2.0, 1.0, 0.5, 1.0, 1.0);
  const double C1 = contraction_C1(kappa_bar, 2.0, 20);
  const std::vector<long> ks{10, 50, 100};
  std::map<long, double> mean;
  double mean0 = 0.0;
  const int seeds = 50;
  for (int sd = 0; sd < seeds; ++sd) {
    IdentityCase ic = identity_case(1000 + sd);
    auto s = make_surrogate("fb", ic.g.composite, 0.5);
    auto lyap = [&](const SurrogateState& st) {
      return 0.5 * (st.x - ic.xs).squaredNorm() + s->value(st) - ic.fstar;
    };
    mean0 += lyap(s->make_state(ic.g.x0)) / seeds;
    SolverConfig cfg;
    cfg.max_iterations = 100;
    cfg.max_epochs = 100;
    cfg.grad_tol = 1e-300;
    cfg.seed = 5000 + sd;
    cd_run(*s, ic.g.x0, cfg, [&](long k, int, const SurrogateState& st) {
      if (std::find(ks.begin(), ks.end(), k) != ks.end()) mean[k] += lyap(st) / seeds;
    });
  }
  bool ok = mean.size() == ks.size();
  std::ostringstream os;
  os.precision(4);
  os << "C1=" << C1;
  for (long k : ks) {
    const double bound = std::pow(C1, double(k)) * mean0 * 1.2;
    ok = ok && mean[k] <= bound;
    os << "  k=" << k << ": " << mean[k] << " <= " << bound;
  }
  report(5, "mean Lyapunov contraction over 50 seeds", ok, os.str());
}

struct Fit {
  double slope = 0.0, r2 = 0.0;
  int points = 0;
};

Fit linear_fit(const std::vector<double>& y) {
  Fit f;
  f.points = static_cast<int>(y.size());
  if (f.points < 3) return f;
  double mx = 0, my = 0;
  for (int i = 0; i < f.points; ++i) mx += i, my += y[i];
  mx /= f.points;
  my /= f.points;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (i - mx) * (i - mx);
    sxy += (i - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

void criterion_restart() {
  const auto t0 = Clock::now();
  const long K = restart_period(20, 2.0, growth_constant_fb(2.0, 1.0, 0.5, 1.0, 1.0), std::exp(-2.0));
  std::vector<double> slopes, r2s;
  int reached = 0, min_points = 1 << 30;
  double worst_final = 0.0;
  for (int sd = 0; sd < 20; ++sd) {
    IdentityCase ic = identity_case(2000 + sd);
    auto s = make_surrogate("fb", ic.g.composite, 0.5);
    SolverConfig cfg;
    cfg.grad_tol = 1e-300;
    cfg.max_epochs = 1000000;
    cfg.seed = 7000 + sd;
    const SolveResult res = restart_run(*s, ic.g.x0, cfg, RestartSchedule::fixed(K), 50);
    // rounds above the floating-point floor
    const double floor = 1e-12 * (1.0 + std::abs(ic.fstar));
    std::vector<double> logs;
    bool hit = false;
    for (std::size_t r = 0; r < res.round_values.size() && r <= 50; ++r) {
      const double gap = res.round_values[r] - ic.fstar;
      hit = hit || gap <= 1e-8;
      if (gap > floor && logs.size() == r) logs.push_back(std::log(gap));
    }
    const double final_gap = ic.g.composite.value(s->B_at(res.x)) - ic.fstar;
    worst_final = std::max(worst_final, final_gap);
    reached += (hit && final_gap <= 1e-8) ? 1 : 0;
    const Fit f = linear_fit(logs);
    min_points = std::min(min_points, f.points);
    slopes.push_back(f.slope);
    r2s.push_back(f.r2);
  }
  const double secs = seconds_since(t0);
  const double ms = median(slopes), mr = median(r2s);
  const bool ok = ms < 0.0 && mr >= 0.9 && reached == 20 && secs < 60.0 && min_points >= 3;
  std::ostringstream os;
  os.precision(4);
  os << "K=" << K << " median slope " << ms << " < 0, median R^2 " << mr << " >= 0.9, " << reached
     << "/20 reach 1e-8 (worst final F(B x) - F* " << worst_final << "), fit points >= " << min_points << ", "
     << secs << " s < 60 s";
  report(6, "restarted method converges linearly", ok, os.str());
}

void criterion_ordering() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  os.precision(3);
  const fs::path root = fs::temp_directory_path() / "smoothcd_acceptance_ordering";
  for (double lambda : {1.0, 0.1}) {
    ExperimentSpec spec;
    spec.generator = "quadratic_l2";
    spec.n = 200;
    spec.m = 100;
    spec.lambda = lambda;
    spec.seed = 100;
    spec.repeats = 20;
    spec.smoothings = smoothing_names();
    SolverSpec cd, accd;
    cd.name = "cd";
    accd.name = "accd";
    cd.cfg.max_epochs = accd.cfg.max_epochs = 100000;
    cd.cfg.grad_tol = accd.cfg.grad_tol = 0.1;
    spec.solvers = {cd, accd};
    spec.output = (root / (lambda == 1.0 ? "l1" : "l01")).string();
    spec.write_traces = false;
    const ExperimentResult res = run_experiment(spec);
    for (const auto& sm : spec.smoothings) {
      std::map<std::uint64_t, double> cd_ep, accd_ep;
      for (const auto& r : res.runs) {
        if (r.smoothing != sm || !r.ok || !r.converged) continue;
        (r.solver == "cd" ? cd_ep : accd_ep)[r.seed] = r.epochs;
      }
      int wins = 0;
      for (const auto& [seed, e] : accd_ep)
        if (cd_ep.count(seed) && e <= cd_ep[seed]) ++wins;
      // a seed where only the accelerated method converged also counts in its favour
      for (const auto& [seed, e] : accd_ep)
        if (!cd_ep.count(seed)) ++wins;
      const double frac = wins / 20.0;
      ok = ok && frac >= 0.7;
      os << " l=" << lambda << "/" << sm << ":" << frac;
    }
  }
  fs::remove_all(root);
  os << ", " << seconds_since(t0) << " s";
  report(7, "accelerated epochs <= plain epochs in >= 70% of 20 seeds", ok, os.str().substr(1));
}

// Enumerates the signs of consecutive differences; within each sign pattern the minimizer of
// 1/2 |x - y|^2 + lambda sum s_i (x_{i+1} - x_i) over {x : x_{i+1} = x_i where s_i = 0} is explicit.
VectorXd tv_oracle(const VectorXd& y, double lambda) {
  const int n = static_cast<int>(y.size());
  auto objective = [&](const VectorXd& x) {
    double tv = 0;
    for (int i = 0; i + 1 < n; ++i) tv += std::abs(x[i + 1] - x[i]);
    return 0.5 * (x - y).squaredNorm() + lambda * tv;
  };
  int total = 1;
  for (int i = 0; i + 1 < n; ++i) total *= 3;
  VectorXd best;
  double fbest = 1e300;
  for (int code = 0; code < total; ++code) {
    std::vector<int> s(n - 1);
    int c = code;
    for (int i = 0; i + 1 < n; ++i) s[i] = c % 3 - 1, c /= 3;
    // unconstrained stationary point y - lambda D's
    VectorXd v = y;
    for (int i = 0; i + 1 < n; ++i) {
      v[i] += lambda * s[i];
      v[i + 1] -= lambda * s[i];
    }
    VectorXd x(n);
    int start = 0;
    for (int i = 0; i < n; ++i) {
      if (i + 1 == n || s[i] != 0) {
        const double mean = v.segment(start, i - start + 1).mean();
        x.segment(start, i - start + 1).setConstant(mean);
        start = i + 1;
      }
    }
    const double f = objective(x);
    if (f < fbest) fbest = f, best = x;
  }
  return best;
}

void criterion_prox() {
  const SuiteResult suite = run_prox_suite();
  double worst_bf = 0.0;
  bool bf_ok = true;
  int kinds = 0;
  for (const auto& c : suite.checks) {
    if (c.name.rfind("tv_sign", 0) == 0) continue;
    worst_bf = std::max(worst_bf, c.value);
    bf_ok = bf_ok && c.value <= 1e-5;
    ++kinds;
  }
  double worst_tv = 0.0;
  int grids = 0;
  for (double lambda : {0.1, 0.5, 2.0}) {
    for (int code = 0; code < 81; ++code) {
      VectorXd y(4);
      int c = code;
      for (int i = 0; i < 4; ++i) y[i] = c % 3 - 1, c /= 3;
      worst_tv = std::max(worst_tv, (prox_tv_1d(lambda, y) - tv_oracle(y, lambda)).lpNorm<Eigen::Infinity>());
      ++grids;
    }
  }
  report(8, "prox maps vs brute force and TV vs sign-pattern enumeration",
         bf_ok && worst_tv <= 1e-12 && kinds >= 11,
         fmt("brute force max %.2e <= 1e-5 over %.0f kinds x 50, TV max %.2e on 243 grids", worst_bf, kinds,
             worst_tv));
}

void criterion_rrcd() {
  double descent = 0.0, stat = 0.0;
  bool finished = true;
  for (int sd = 0; sd < 5; ++sd) {
    const QuarticProblem q = gen_quartic(10, 8, 600 + sd);
    const PowerKernel phi(4.0, q.partition());
    Pcg32 rng(700 + sd, 3);
    SolverConfig cfg;
    cfg.max_iterations = 10000;
    cfg.max_epochs = 1000;
    cfg.grad_tol = 1e-300;
    cfg.seed = 800 + sd;
    RrcdOptions opt;
    opt.check_descent = true;
    const RrcdResult res = rrcd_run(q, phi, gaussian(rng, 10), cfg, opt);
    descent = std::max(descent, res.max_descent_violation);
    stat = std::max(stat, res.max_stationarity);
    finished = finished && res.iterations == 10000;
  }
  Pcg32 rng(909, 1);
  double sextic = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double a = std::exp(4.0 * rng.normal()), b = std::exp(4.0 * rng.normal()) * (rng.uniform() < 0.2 ? 0 : 1),
                 c = std::exp(4.0 * rng.normal());
    const double al = sextic_root(a, b, c);
    const double a2 = al * al;
    const double val = a * a2 * a2 * a2 + (2 * a - b) * a2 * a2 + (a - 2 * b) * a2 - c;
    const double scale = a * a2 * a2 * a2 + std::abs(2 * a - b) * a2 * a2 + std::abs(a - 2 * b) * a2 + c;
    sextic = std::max(sextic, std::abs(val) / scale);
  }
  const double unit = std::abs(sextic_root(1.0, 0.0, 4.0) - 1.0);
  report(9, "relative coordinate descent on the quartic problem",
         finished && descent <= 1e-12 && stat <= 1e-8 && sextic <= 1e-10 && unit <= 1e-12,
         fmt("descent violation %.2e <= 1e-12, stationarity %.2e <= 1e-8, sextic residual %.2e", descent, stat,
             sextic) +
             fmt(", |root(1,0,4) - 1| = %.1e", unit));
}

void criterion_relative_smoothness() {
  // signed: a negative value is the smallest observed margin
  double worst = -1e300;
  Pcg32 rng(1001, 1);
  auto phi = [](const VectorXd& x) { return std::pow(x.squaredNorm(), 2) / 4.0 + x.squaredNorm() / 2.0; };
  auto dphi = [](const VectorXd& x) -> VectorXd { return (x.squaredNorm() + 1.0) * x; };
  for (int sd = 0; sd < 4; ++sd) {
    const QuarticProblem q = gen_quartic(10, 8, 1100 + sd);
    for (int t = 0; t < 250; ++t) {
      const VectorXd x = std::pow(10.0, 2.0 * rng.uniform() - 1.0) * gaussian(rng, 10);
      const int i = static_cast<int>(rng.below(10));
      const double d = std::pow(10.0, 3.0 * rng.uniform() - 2.0) * rng.normal();
      VectorXd y = x;
      y[i] += d;
      const double D = phi(y) - phi(x) - dphi(x).dot(y - x);
      const double fx = q.value(x);
      const double rhs = fx + q.coord_grad(i, x)[0] * d + q.lipschitz()[i] * D;
      worst = std::max(worst, (q.value(y) - rhs) / (1.0 + std::abs(fx)));
    }
  }
  report(10, "relative smoothness of the quartic problem, 1e3 samples", worst <= 1e-10,
         fmt("max signed violation %.2e <= 1e-10", worst));
}

void criterion_constants() {
  bool ok = true;
  std::ostringstream os;
  auto eq = [&](const char* what, double got, double want) {
    if (got != want) {
      ok = false;
      os << what << "=" << got << " ";
    }
  };
  eq("me2", growth_constant_me(2, 1, 1), 0.5);
  eq("me1", growth_constant_me(1, 1, 1, 2), 1.0 / 9.0);
  eq("fb", growth_constant_fb(2, 1, 0.5, 1, 1), 0.5);
  eq("ns2", growth_constant_ns(2, 1, 1), 0.25);
  eq("ns1", growth_constant_ns(1, 1, 1, 2.0), 0.5);
  eq("K55", double(restart_period(10, 2, 1, std::exp(-2.0))), 55);
  eq("K1", double(restart_period(1, 2, 4, 1)), 1);
  eq("K4", double(restart_period(1, 1, 1, 1, 4)), 4);
  const std::vector<long> want{5, 10, 5, 20, 5, 10, 5};
  if (doubling_schedule(5, 7) != want) {
    ok = false;
    os << "doubling ";
  }
  report(11, "rate constants and doubling schedule", ok, ok ? "all exact" : os.str());
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// drop the time column of a trace
std::string strip_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  int col = -1;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (col < 0)
      for (std::size_t j = 0; j < cells.size(); ++j)
        if (cells[j].find("time") != std::string::npos) col = static_cast<int>(j);
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (static_cast<int>(j) != col) out += cells[j] + ",";
    out += "\n";
  }
  return out;
}

void drop_time_keys(json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end();) {
      if (it.key().find("time") != std::string::npos) {
        it = j.erase(it);
      } else {
        drop_time_keys(*it);
        ++it;
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) drop_time_keys(v);
  }
}

void criterion_determinism() {
  const fs::path root = fs::temp_directory_path() / "smoothcd_acceptance_determinism";
  fs::remove_all(root);
  ExperimentSpec spec;
  spec.generator = "quadratic_tv";
  spec.n = 30;
  spec.lambda = 0.5;
  spec.seed = 9;
  spec.repeats = 2;
  spec.smoothings = smoothing_names();
  SolverSpec cd, accd, rs;
  cd.name = "cd";
  accd.name = "accd";
  rs.name = "restart";
  for (SolverSpec* s : {&cd, &accd, &rs}) {
    s->cfg.max_epochs = 300;
    s->cfg.grad_tol = 1e-2;
    s->cfg.alpha = 0.5;
  }
  spec.solvers = {cd, accd, rs};
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* sub : {"a", "b"}) {
    spec.output = (root / sub).string();
    run_experiment(spec);
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(root / sub)) {
      const std::string name = e.path().filename().string();
      if (name == "summary.json") {
        json j = read_json_file(e.path());
        drop_time_keys(j);
        if (j.contains("spec")) j["spec"].erase("output");
        files[name] = j.dump();
      } else {
        files[name] = strip_time(read_file(e.path()));
      }
    }
    trees.push_back(std::move(files));
  }
  fs::remove_all(root);
  const bool ok = trees[0] == trees[1] && trees[0].size() == 25;
  report(12, "reruns give identical traces and summaries (time excluded)", ok,
         fmt("%.0f files per run, identical: ", double(trees[0].size())) + (trees[0] == trees[1] ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  // optional list of criterion numbers to run
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) only.push_back(std::atoi(argv[a]));
  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  Instance in;
  if (want(1) || want(2) || want(3)) in = l1_instance();
  const std::vector<std::pair<int, std::function<void()>>> all{
      {1, [&] { criterion_sandwich(in); }},
      {2, [&] { criterion_gradient(in); }},
      {3, [&] { criterion_lipschitz(in); }},
      {4, criterion_envelope},
      {5, criterion_contraction},
      {6, criterion_restart},
      {7, criterion_ordering},
      {8, criterion_prox},
      {9, criterion_rrcd},
      {10, criterion_relative_smoothness},
      {11, criterion_constants},
      {12, criterion_determinism},
  };
  for (const auto& [id, fn] : all) {
    if (!want(id)) continue;
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, "raised", false, e.what());
    }
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
