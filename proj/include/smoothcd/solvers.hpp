#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "smoothcd/smoothing.hpp"

namespace smoothcd {

struct SolverConfig {
  double alpha = 0.0;  // sampling exponent in [0, 1]
  int max_epochs = 1000;  // one epoch = N coordinate steps
  std::optional<long> max_iterations;  // hard cap on coordinate steps
  double grad_tol = 1e-1;
  std::uint64_t seed = 0;
  int trace_every = 1;
  double sigma = 0.0;  // strong convexity of F_gamma for the accelerated method

  void validate() const;
};

struct TraceRecord {
  long k = 0;
  double epoch = 0.0;
  double time_s = 0.0;
  double f_gamma = 0.0;
  double f_orig_at_B = 0.0;
  double grad_norm = 0.0;
};

struct SolveResult {
  VectorXd x;
  std::vector<TraceRecord> trace;
  long iterations = 0;
  double epochs = 0.0;
  bool converged = false;
  double time_s = 0.0;
  bool inexact_prox = false;
  // Restart only: F_gamma of the kept point after each round (index 0 = start).
  std::vector<double> round_values;
  std::vector<long> round_lengths;
};

// Called after each coordinate step with (k, block, state after the step).
using StepObserver = std::function<void(long, int, const SurrogateState&)>;

const char* trace_header();
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace, bool with_time = true);

// Randomized block coordinate descent with steps 1/L_i.
SolveResult cd_run(const SmoothSurrogate& s, const VectorXd& x0, const SolverConfig& cfg,
                   const StepObserver& observer = {});

struct AccdParams {
  double a_next, A_next, B_next, alpha_k, beta_k;
};

// Positive root of a^2 S^2 = (A + a)(B + sigma a) and the derived weights.
AccdParams accd_step_params(double A_k, double B_k, double S_beta, double sigma);

// Accelerated coordinate descent (estimate sequences x, nu, y), sampling with exponent alpha/2.
SolveResult accd_run(const SmoothSurrogate& s, const VectorXd& x0, const SolverConfig& cfg,
                     const StepObserver& observer = {});

std::vector<long> doubling_schedule(long K0, int count);

struct RestartSchedule {
  enum class Mode { fixed, doubling } mode = Mode::fixed;
  long K = 1;  // period (fixed) or K0 (doubling)
  static RestartSchedule fixed(long K) { return {Mode::fixed, K}; }
  static RestartSchedule doubling(long K0) { return {Mode::doubling, K0}; }
  long period(int round) const;
};

// Restarted accelerated coordinate descent keeping the better of the old and new point.
SolveResult restart_run(const SmoothSurrogate& s, const VectorXd& x0, const SolverConfig& cfg,
                        const RestartSchedule& schedule, int max_rounds = 0);

}  // namespace smoothcd
