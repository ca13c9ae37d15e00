#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "smoothcd/bregman.hpp"
#include "smoothcd/problem.hpp"
#include "smoothcd/solvers.hpp"

namespace smoothcd {

using json = nlohmann::json;

// {"format":"dense","rows","cols","data" (row-major)} | {"format":"csc","rows","cols","colptr","rowind","values"}
// | nested arrays of rows.
Matrix matrix_from_json(const json& j);
json matrix_to_json(const Matrix& A);
VectorXd vector_from_json(const json& j);
json vector_to_json(const VectorXd& v);

// {"kind": ..., "params": {...}}
ProxOracle prox_from_json(const json& j, int n);
json prox_to_json(const ProxOracle& psi);

// Either a quadratic composite or a quartic (relative-smooth) problem.
struct LoadedProblem {
  std::optional<QuadraticComposite> composite;
  std::optional<QuarticProblem> quartic;
  std::optional<VectorXd> x0;
  int n() const;
};

LoadedProblem problem_from_json(const json& j);
json problem_to_json(const QuadraticComposite& p, const std::optional<VectorXd>& x0 = std::nullopt);

// {"kind":"power","p":4} | {"kind":"quad","A":...}
KernelPtr kernel_from_json(const json& j, const BlockPartition& partition);

struct RunConfig {
  std::string problem_path;  // resolved against the config file location
  std::string smoothing = "fb";
  std::optional<double> gamma;
  double gamma_eps = 0.1;
  std::string solver = "cd";  // cd | accd | restart | rrcd
  SolverConfig solver_cfg;
  RestartSchedule restart = RestartSchedule::doubling(10);
  int max_rounds = 0;
  json kernel = json{{"kind", "power"}, {"p", 4}};
};

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir = {});
json run_config_to_json(const RunConfig& cfg);

json read_json_file(const std::filesystem::path& path);

}  // namespace smoothcd
