#include "smoothcd/solvers.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>

#include "smoothcd/errors.hpp"
#include "smoothcd/lipschitz.hpp"
#include "smoothcd/rng.hpp"

namespace smoothcd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Pcg32 make_rng(std::uint64_t seed) { return Pcg32(splitmix64(seed), 0x2545f491u); }

void require_finite(const VectorXd& g, long k, int i) {
  if (!g.allFinite())
    throw NumericalFailure("non-finite coordinate gradient at iteration " + std::to_string(k) + ", block " +
                           std::to_string(i));
}

struct Tracker {
  const SmoothSurrogate& s;
  const SolverConfig& cfg;
  Clock::time_point t0 = Clock::now();
  SolveResult& out;

  // Appends a trace row for `st`; returns true when the gradient test passes.
  bool record(long k, const SurrogateState& st) {
    TraceRecord r;
    r.k = k;
    r.epoch = double(k) / s.blocks();
    r.f_gamma = s.value(st);
    r.f_orig_at_B = s.objective(s.map_B(st));
    const VectorXd g = s.full_grad(st);
    r.grad_norm = g.norm();
    if (!std::isfinite(r.grad_norm)) throw NumericalFailure("non-finite gradient norm at iteration " + std::to_string(k));
    r.time_s = seconds_since(t0);
    out.trace.push_back(r);
    return r.grad_norm <= cfg.grad_tol;
  }
};

long iteration_budget(const SmoothSurrogate& s, const SolverConfig& cfg) {
  long budget = long(cfg.max_epochs) * s.blocks();
  if (cfg.max_iterations) budget = std::min(budget, *cfg.max_iterations);
  return budget;
}

// Runs K accelerated steps from `x0`; `checkpoint(k, x)` may stop the loop early.
template <class Checkpoint>
SurrogateState accd_core(const SmoothSurrogate& s, SurrogateState x, long K, double alpha, double sigma, Pcg32& rng,
                         const StepObserver& observer, Checkpoint&& checkpoint, long k_offset, long* done) {
  const VectorXd& L = s.lipschitz();
  const double beta_exp = 0.5 * alpha;
  const Sampler sampler(L, beta_exp);
  double S_beta = 0.0;
  for (Eigen::Index i = 0; i < L.size(); ++i) S_beta += std::pow(L[i], beta_exp);
  SurrogateState nu = x;
  double A = 0.0, B = 1.0;
  long k = 0;
  for (; k < K; ++k) {
    const int i = sampler.draw(rng);
    const AccdParams p = accd_step_params(A, B, S_beta, sigma);
    const double denom = 1.0 - p.alpha_k * p.beta_k;
    SurrogateState y = combine((1.0 - p.alpha_k) / denom, x, p.alpha_k * (1.0 - p.beta_k) / denom, nu);
    const VectorXd g = s.coord_grad(i, y);
    require_finite(g, k_offset + k + 1, i);
    SurrogateState xn = y;
    s.apply_step(xn, i, -g / L[i]);
    nu = p.beta_k == 0.0 ? std::move(nu) : combine(1.0 - p.beta_k, nu, p.beta_k, y);
    const double coef = p.a_next / (std::pow(L[i], 1.0 - alpha) * p.B_next * sampler.probability(i));
    s.apply_step(nu, i, -coef * g);
    x = std::move(xn);
    A = p.A_next;
    B = p.B_next;
    if (observer) observer(k_offset + k + 1, i, x);
    if (checkpoint(k_offset + k + 1, x)) {
      ++k;
      break;
    }
  }
  if (done) *done = k;
  return x;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  if (max_epochs < 1) throw ArgumentError("max_epochs must be at least 1");
  if (!(grad_tol > 0.0)) throw ArgumentError("grad_tol must be positive");
  if (trace_every < 1) throw ArgumentError("trace_every must be at least 1");
  if (sigma < 0.0) throw ArgumentError("sigma must be nonnegative");
  if (max_iterations && *max_iterations < 0) throw ArgumentError("max_iterations must be nonnegative");
}

const char* trace_header() { return "k,epoch,time_s,f_gamma,f_orig_at_B,grad_norm"; }

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace, bool with_time) {
  os << trace_header() << '\n';
  os << std::setprecision(17);
  for (const auto& r : trace) {
    os << r.k << ',' << r.epoch << ',';
    if (with_time) os << r.time_s;
    os << ',' << r.f_gamma << ',' << r.f_orig_at_B << ',' << r.grad_norm << '\n';
  }
}

SolveResult cd_run(const SmoothSurrogate& s, const VectorXd& x0, const SolverConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  SolveResult out;
  out.inexact_prox = s.inexact();
  Tracker tr{s, cfg, Clock::now(), out};
  const Sampler sampler(s.lipschitz(), cfg.alpha);
  Pcg32 rng = make_rng(cfg.seed);
  SurrogateState st = s.make_state(x0);
  const long budget = iteration_budget(s, cfg);
  const long check = long(cfg.trace_every) * s.blocks();
  const VectorXd& L = s.lipschitz();
  long k = 0;
  out.converged = tr.record(0, st);
  while (!out.converged && k < budget) {
    const int i = sampler.draw(rng);
    const VectorXd g = s.coord_grad(i, st);
    require_finite(g, k + 1, i);
    s.apply_step(st, i, -g / L[i]);
    ++k;
    if (observer) observer(k, i, st);
    if (k % check == 0 || k == budget) out.converged = tr.record(k, st);
  }
  out.x = st.x;
  out.iterations = k;
  out.epochs = double(k) / s.blocks();
  out.time_s = seconds_since(tr.t0);
  return out;
}

AccdParams accd_step_params(double A_k, double B_k, double S_beta, double sigma) {
  if (A_k < 0.0 || B_k < 1.0 - 1e-12 || !(S_beta > 0.0) || sigma < 0.0)
    throw ArgumentError("accd_step_params needs A >= 0, B >= 1, S > 0, sigma >= 0");
  // (S^2 - sigma) a^2 - (B + sigma A) a - A B = 0
  const double qa = S_beta * S_beta - sigma;
  if (!(qa > 0.0)) throw ArgumentError("sigma must be smaller than S_beta^2");
  const double qb = B_k + sigma * A_k;
  const double disc = qb * qb + 4.0 * qa * A_k * B_k;
  const double a = (qb + std::sqrt(disc)) / (2.0 * qa);
  AccdParams p;
  p.a_next = a;
  p.A_next = A_k + a;
  p.B_next = B_k + sigma * a;
  p.alpha_k = a / p.A_next;
  p.beta_k = sigma * a / p.B_next;
  return p;
}

SolveResult accd_run(const SmoothSurrogate& s, const VectorXd& x0, const SolverConfig& cfg,
                     const StepObserver& observer) {
  cfg.validate();
  SolveResult out;
  out.inexact_prox = s.inexact();
  Tracker tr{s, cfg, Clock::now(), out};
  Pcg32 rng = make_rng(cfg.seed);
  const long budget = iteration_budget(s, cfg);
  const long check = long(cfg.trace_every) * s.blocks();
  SurrogateState x = s.make_state(x0);
  out.converged = tr.record(0, x);
  long done = 0;
  if (!out.converged && budget > 0) {
    auto checkpoint = [&](long k, const SurrogateState& st) {
      if (k % check == 0 || k == budget) {
        out.converged = tr.record(k, st);
        return out.converged;
      }
      return false;
    };
    x = accd_core(s, std::move(x), budget, cfg.alpha, cfg.sigma, rng, observer, checkpoint, 0, &done);
  }
  out.x = x.x;
  out.iterations = done;
  out.epochs = double(done) / s.blocks();
  out.time_s = seconds_since(tr.t0);
  return out;
}

std::vector<long> doubling_schedule(long K0, int count) {
  if (K0 < 1) throw ArgumentError("K0 must be at least 1");
  if (count < 0) throw ArgumentError("count must be nonnegative");
  std::vector<long> out(count);
  for (int r = 0; r < count; ++r) {
    unsigned long v = static_cast<unsigned long>(r) + 1;
    long mult = 1;
    while ((v & 1u) == 0) {
      v >>= 1;
      mult *= 2;
    }
    out[r] = mult * K0;
  }
  return out;
}

long RestartSchedule::period(int round) const {
  if (K < 1) throw ArgumentError("restart period must be at least 1");
  if (mode == Mode::fixed) return K;
  return doubling_schedule(K, round + 1).back();
}

SolveResult restart_run(const SmoothSurrogate& s, const VectorXd& x0, const SolverConfig& cfg,
                        const RestartSchedule& schedule, int max_rounds) {
  cfg.validate();
  SolveResult out;
  out.inexact_prox = s.inexact();
  Tracker tr{s, cfg, Clock::now(), out};
  Pcg32 rng = make_rng(cfg.seed);
  const long budget = iteration_budget(s, cfg);
  SurrogateState best = s.make_state(x0);
  double f_best = s.value(best);
  out.round_values.push_back(f_best);
  out.converged = tr.record(0, best);
  long total = 0;
  auto never = [](long, const SurrogateState&) { return false; };
  for (int r = 0; !out.converged && total < budget; ++r) {
    if (max_rounds > 0 && r >= max_rounds) break;
    const long K = std::min(schedule.period(r), budget - total);
    SurrogateState cand = accd_core(s, best, K, cfg.alpha, cfg.sigma, rng, {}, never, total, nullptr);
    const double f_cand = s.value(cand);
    if (!std::isfinite(f_cand)) throw NumericalFailure("non-finite surrogate value after restart round " + std::to_string(r));
    if (f_cand <= f_best) {
      best = std::move(cand);
      f_best = f_cand;
    }
    total += K;
    out.round_values.push_back(f_best);
    out.round_lengths.push_back(K);
    out.converged = tr.record(total, best);
  }
  out.x = best.x;
  out.iterations = total;
  out.epochs = double(total) / s.blocks();
  out.time_s = seconds_since(tr.t0);
  return out;
}

}  // namespace smoothcd
