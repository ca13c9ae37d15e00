#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothcd/problem.hpp"
#include "smoothcd/rng.hpp"
#include "smoothcd/smoothing.hpp"

namespace smoothcd {

// A generated instance of min 1/2 ||Bx - c||^2 + psi(x), stored as the composite
// 1/2 x'Ax + b'x + psi(x) with A = B'B, b = -B'c; `offset` = 1/2 ||c||^2 restores the constant.
struct GeneratedProblem {
  std::string family;
  QuadraticComposite composite;
  SaddleProblem saddle;
  VectorXd x0;
  double offset = 0.0;
};

// B is m x n sparse with density 0.1 and N(0,1) entries; c, x0 ~ N(0,1); psi = lambda ||x||.
GeneratedProblem gen_quadratic_l2(int n, int m, double lambda, std::uint64_t seed);

// B = Q'CQ with Q a product of 5n random Givens rotations and
// C = diag(100, U(0,1) x (n/2 - 1), 0 x (n - n/2)); psi = lambda TV.
GeneratedProblem gen_quadratic_tv(int n, double lambda, std::uint64_t seed);

// Dense B (m x n) with N(0,1) / sqrt(m) entries, psi = lambda ||x||_1.
GeneratedProblem gen_quadratic_l1(int n, int m, double lambda, std::uint64_t seed);

// B = I, c ~ N(0, I), psi = lambda ||x||_1; the minimizer is soft(c, lambda).
GeneratedProblem gen_identity_l1(int n, double lambda, std::uint64_t seed);

MatrixXd random_givens_orthogonal(int n, int rotations, Pcg32& rng);

struct ReferenceSolution {
  VectorXd x;
  double f = 0.0;
  bool exact = false;      // closed form
  bool converged = false;  // gradient mapping reached the tolerance
  long iterations = 0;
  double residual = 0.0;   // final gradient-mapping norm
};

// Closed form for diagonal A with psi in {zero, l1}; otherwise accelerated proximal
// gradient with adaptive restart until the gradient mapping is <= tol.
ReferenceSolution reference_solve(const QuadraticComposite& p, double tol = 1e-10, long max_iterations = 500000);

const std::vector<std::string>& smoothing_names();
// Throws ArgumentError naming the valid set.
void check_smoothing_name(const std::string& name);

// moreau: 1, fb/dr: 0.5 / L, ns: eps / (2 D).
double default_gamma(const std::string& smoothing, const QuadraticComposite& p, double eps = 0.1);

SurrogatePtr make_surrogate(const std::string& smoothing, const QuadraticComposite& p, double gamma);

}  // namespace smoothcd
