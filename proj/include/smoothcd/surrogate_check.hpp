#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "smoothcd/smoothing.hpp"

namespace smoothcd {

struct CheckOptions {
  int trials = 100;           // sandwich, gradient and convexity samples
  int lipschitz_trials = 1000;
  int cache_steps = 1000;
  double radius = 1.0;        // sampled points are centre + radius * N(0, I)
  VectorXd centre;            // empty means the origin
  double fd_step = 1e-6;
  std::uint64_t seed = 1;
};

// Largest observed violation of each property, all relative.
struct CheckReport {
  double sandwich = 0.0;
  double gradient = 0.0;
  double lipschitz = 0.0;
  double cocoercivity = 0.0;
  double convexity = 0.0;
  double cache = 0.0;

  bool passed(double sandwich_tol = 1e-8, double gradient_tol = 1e-5, double lipschitz_tol = 1e-8) const;
  std::string summary() const;
};

// Central differences per coordinate.
VectorXd finite_diff_grad(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double h = 1e-6);

// Runs the sandwich, finite-difference, coordinate-Lipschitz/cocoercivity, convexity and
// cache-coherence families against `s`; F is the original objective.
CheckReport surrogate_check(const SmoothSurrogate& s, const std::function<double(const VectorXd&)>& F,
                            const CheckOptions& opt = {});
inline CheckReport surrogate_check(const SmoothSurrogate& s, const CheckOptions& opt = {}) {
  return surrogate_check(s, [&s](const VectorXd& x) { return s.objective(x); }, opt);
}

}  // namespace smoothcd
