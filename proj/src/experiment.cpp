#include "smoothcd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "smoothcd/errors.hpp"
#include "smoothcd/harness.hpp"

namespace smoothcd {

std::string SolverSpec::label() const { return name; }

void ExperimentSpec::validate() const {
  if (generator != "quadratic_l2" && generator != "quadratic_tv")
    throw ConfigurationError("unknown generator '" + generator + "' (valid: quadratic_l2, quadratic_tv)");
  if (n < 1 || m < 1) throw ConfigurationError("problem dimensions must be at least 1");
  if (repeats < 1) throw ConfigurationError("repeats must be at least 1");
  if (smoothings.empty() || solvers.empty()) throw ConfigurationError("need at least one smoothing and one solver");
  for (const auto& s : smoothings) {
    try {
      check_smoothing_name(s);
    } catch (const ArgumentError& e) {
      throw ConfigurationError(e.what());
    }
  }
  for (const auto& s : solvers) {
    if (s.name != "cd" && s.name != "accd" && s.name != "restart")
      throw ConfigurationError("unknown solver '" + s.name + "' (valid: cd, accd, restart)");
    try {
      s.cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigurationError(e.what());
    }
  }
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigurationError("experiment spec: expected a JSON object");
  ExperimentSpec s;
  try {
    const json& p = j.at("problem");
    s.generator = p.value("generator", s.generator);
    s.n = p.value("n", s.n);
    s.m = p.value("m", s.generator == "quadratic_tv" ? s.n : s.n / 2);
    s.lambda = p.value("lambda", s.lambda);
    s.seed = p.value("seed", s.seed);
    if (j.contains("smoothings")) s.smoothings = j.at("smoothings").get<std::vector<std::string>>();
    if (j.contains("solvers")) {
      s.solvers.clear();
      for (const auto& sj : j.at("solvers")) {
        json cfg = sj;
        if (sj.is_string()) cfg = json{{"solver", sj}};
        if (cfg.contains("name")) cfg["solver"] = cfg["name"];
        const RunConfig rc = run_config_from_json(cfg);
        SolverSpec ss;
        ss.name = rc.solver;
        ss.cfg = rc.solver_cfg;
        ss.restart = rc.restart;
        ss.max_rounds = rc.max_rounds;
        s.solvers.push_back(ss);
      }
    }
    s.repeats = j.value("repeats", s.repeats);
    if (j.contains("gamma")) s.gamma = j.at("gamma").get<std::map<std::string, double>>();
    s.eps = j.value("eps", s.eps);
    s.output = j.value("output", s.output);
    s.write_traces = j.value("write_traces", s.write_traces);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("experiment spec: ") + e.what());
  }
  s.validate();
  return s;
}

bool ExperimentResult::all_completed() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.ok; });
}

int worker_count(int jobs) {
  int w = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SMOOTHCD_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) w = v;
  }
  return std::max(1, std::min(w, jobs));
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::filesystem::path out_dir = spec.output;
  std::filesystem::create_directories(out_dir);

  struct Job {
    int repeat, smoothing, solver;
  };
  std::vector<Job> jobs;
  for (int r = 0; r < spec.repeats; ++r)
    for (int a = 0; a < static_cast<int>(spec.smoothings.size()); ++a)
      for (int b = 0; b < static_cast<int>(spec.solvers.size()); ++b) jobs.push_back({r, a, b});

  // problems are generated once per repeat, before the workers start
  std::vector<GeneratedProblem> problems;
  for (int r = 0; r < spec.repeats; ++r) {
    const std::uint64_t seed = spec.seed + r;
    problems.push_back(spec.generator == "quadratic_l2" ? gen_quadratic_l2(spec.n, spec.m, spec.lambda, seed)
                                                        : gen_quadratic_tv(spec.n, spec.lambda, seed));
  }

  ExperimentResult result;
  result.runs.resize(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      RunOutcome& out = result.runs[k];
      const std::string& sm = spec.smoothings[job.smoothing];
      const SolverSpec& sv = spec.solvers[job.solver];
      const GeneratedProblem& gp = problems[job.repeat];
      out.smoothing = sm;
      out.solver = sv.label();
      out.seed = spec.seed + job.repeat;
      try {
        const auto it = spec.gamma.find(sm);
        const double gamma = it != spec.gamma.end() ? it->second : default_gamma(sm, gp.composite, spec.eps);
        const SurrogatePtr s = make_surrogate(sm, gp.composite, gamma);
        SolverConfig cfg = sv.cfg;
        cfg.seed = out.seed;
        SolveResult res;
        if (sv.name == "cd")
          res = cd_run(*s, gp.x0, cfg);
        else if (sv.name == "accd")
          res = accd_run(*s, gp.x0, cfg);
        else
          res = restart_run(*s, gp.x0, cfg, sv.restart, sv.max_rounds);
        out.ok = true;
        out.converged = res.converged;
        out.inexact_prox = res.inexact_prox;
        out.epochs = res.epochs;
        out.time_s = res.time_s;
        if (!res.trace.empty()) {
          out.f_gamma = res.trace.back().f_gamma;
          out.f_orig = res.trace.back().f_orig_at_B;
          out.grad_norm = res.trace.back().grad_norm;
        }
        if (spec.write_traces) {
          out.trace_file = sm + "_" + sv.label() + (res.inexact_prox ? "_inexact-prox" : "") + "_seed" +
                           std::to_string(out.seed) + "_" + std::to_string(job.solver) + ".csv";
          std::ofstream f(out_dir / out.trace_file);
          write_trace_csv(f, res.trace);
          if (!f) throw std::runtime_error("cannot write " + (out_dir / out.trace_file).string());
        }
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };
  const int workers = worker_count(static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json groups = json::array();
  for (size_t a = 0; a < spec.smoothings.size(); ++a) {
    for (size_t b = 0; b < spec.solvers.size(); ++b) {
      std::vector<double> epochs, times;
      int success = 0, failed = 0, total = 0;
      bool inexact = false;
      for (size_t k = 0; k < jobs.size(); ++k) {
        if (jobs[k].smoothing != static_cast<int>(a) || jobs[k].solver != static_cast<int>(b)) continue;
        const RunOutcome& r = result.runs[k];
        ++total;
        if (!r.ok) {
          ++failed;
          continue;
        }
        inexact = inexact || r.inexact_prox;
        times.push_back(r.time_s);
        if (r.converged) {
          ++success;
          epochs.push_back(r.epochs);
        }
      }
      json g{{"smoothing", spec.smoothings[a]},
             {"solver", spec.solvers[b].label()},
             {"runs", total},
             {"failed", failed},
             {"inexact_prox", inexact},
             {"success_rate", total ? double(success) / total : 0.0},
             {"median_time_s", times.empty() ? json(nullptr) : json(median(times))}};
      g["median_epochs_to_tol"] = epochs.empty() ? json(nullptr) : json(median(epochs));
      groups.push_back(g);
    }
  }
  json runs = json::array();
  for (const auto& r : result.runs) {
    json jr{{"smoothing", r.smoothing}, {"solver", r.solver}, {"seed", r.seed},   {"ok", r.ok},
            {"converged", r.converged}, {"epochs", r.epochs},  {"time_s", r.time_s}, {"trace", r.trace_file}};
    if (r.ok) {
      jr["f_gamma"] = r.f_gamma;
      jr["f_orig_at_B"] = r.f_orig;
      jr["grad_norm"] = r.grad_norm;
    } else {
      jr["error"] = r.error;
    }
    runs.push_back(jr);
  }
  result.summary = json{{"generator", spec.generator}, {"n", spec.n}, {"m", spec.m}, {"lambda", spec.lambda},
                        {"seed", spec.seed}, {"repeats", spec.repeats}, {"groups", groups}, {"runs", runs}};
  std::ofstream f(out_dir / "summary.json");
  f << result.summary.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + (out_dir / "summary.json").string());
  return result;
}

}  // namespace smoothcd
