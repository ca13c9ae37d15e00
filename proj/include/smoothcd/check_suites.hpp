#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace smoothcd {

struct CheckLine {
  std::string name;
  double value = 0.0;  // observed violation (or error)
  double tol = 0.0;
  bool passed() const { return value <= tol; }
};

struct SuiteResult {
  std::string name;
  std::vector<CheckLine> checks;
  double seconds = 0.0;
  bool passed() const;
  // largest value / tol over the checks, and the check that attains it
  double worst_ratio() const;
  const CheckLine* worst() const;
};

struct SuiteOptions {
  std::uint64_t seed = 2024;
  // Multiplies every published coordinate Lipschitz constant; anything below 1 should make the
  // smoothing suite fail.
  double lipschitz_scale = 1.0;
};

const std::vector<std::string>& suite_names();

SuiteResult run_prox_suite(const SuiteOptions& opt = {});
SuiteResult run_smoothing_suite(const SuiteOptions& opt = {});
SuiteResult run_solvers_suite(const SuiteOptions& opt = {});
SuiteResult run_bregman_suite(const SuiteOptions& opt = {});
// Throws ArgumentError for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt = {});

void print_suite(std::ostream& os, const SuiteResult& r, bool verbose = false);

// Exact prox of lambda TV on small inputs by enumerating the sign pattern of Dx.
Eigen::VectorXd tv_prox_sign_pattern(const Eigen::VectorXd& y, double lambda);

}  // namespace smoothcd
