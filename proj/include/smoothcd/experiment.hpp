#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smoothcd/io.hpp"
#include "smoothcd/solvers.hpp"

namespace smoothcd {

struct SolverSpec {
  std::string name = "cd";  // cd | accd | restart
  SolverConfig cfg;
  RestartSchedule restart = RestartSchedule::doubling(10);
  int max_rounds = 0;
  std::string label() const;
};

struct ExperimentSpec {
  std::string generator = "quadratic_l2";  // quadratic_l2 | quadratic_tv
  int n = 100;
  int m = 50;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::string> smoothings{"fb"};
  std::vector<SolverSpec> solvers{SolverSpec{}};
  int repeats = 1;
  std::map<std::string, double> gamma;  // per-smoothing overrides
  double eps = 0.1;                     // target accuracy for the Nesterov default
  std::string output = "results";
  bool write_traces = true;

  void validate() const;
};

ExperimentSpec experiment_spec_from_json(const json& j);

struct RunOutcome {
  std::string smoothing, solver;
  std::uint64_t seed = 0;
  bool ok = false;
  bool converged = false;
  bool inexact_prox = false;
  double epochs = 0.0;
  double time_s = 0.0;
  double f_gamma = 0.0;
  double f_orig = 0.0;
  double grad_norm = 0.0;
  std::string error;
  std::string trace_file;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;  // ordered by (repeat, smoothing, solver)
  json summary;
  bool all_completed() const;
};

// Worker count: SMOOTHCD_THREADS if set, else the hardware concurrency, capped by the job count.
int worker_count(int jobs);

// Runs the smoothing x solver grid over `repeats` seeds (repeat r uses seed + r for both the
// generated problem and the solver); writes one trace CSV per run and summary.json into spec.output.
ExperimentResult run_experiment(const ExperimentSpec& spec);

double median(std::vector<double> v);

}  // namespace smoothcd
