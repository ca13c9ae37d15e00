#pragma once

#include <Eigen/Dense>
#include <functional>

#include "smoothcd/prox.hpp"

namespace smoothcd {

using Eigen::VectorXd;
using ScalarFn = std::function<double(const VectorXd&)>;

// Numerical prox for small n (<= 3): nested golden-section minimization of
// psi(u) + ||u - x||^2 / (2 gamma). Exact up to roundoff for convex psi because
// partial minimization of a convex function stays convex.
// The search box is centre +- radius per coordinate; radius <= 0 picks 4 (|x|_inf + 1).
VectorXd brute_force_prox(const ScalarFn& psi, double gamma, const VectorXd& x, double radius = 0.0,
                          const VectorXd& centre = VectorXd());

// Prox of a prox-oracle function; indicator sets use a chart of their affine hull plus an
// exact penalty for the inequality constraints.
VectorXd brute_force_prox(const ProxOracle& psi, double gamma, const VectorXd& x);

// Golden-section minimizer of a convex scalar function on [lo, hi].
double golden_section_min(const std::function<double(double)>& f, double lo, double hi, double* fmin = nullptr);

}  // namespace smoothcd
