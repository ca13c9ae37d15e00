#include <Eigen/Eigenvalues>

#include "smoothcd/errors.hpp"
#include "smoothcd/smoothing.hpp"

namespace smoothcd {

ForwardBackwardSurrogate::ForwardBackwardSurrogate(QuadraticComposite problem, double gamma)
    : SmoothSurrogate(gamma, problem.partition), problem_(std::move(problem)) {
  if (!(gamma_ * problem_.lipschitz_L < 1.0))
    throw ConfigurationError("forward-backward envelope needs gamma * L < 1 (gamma=" + std::to_string(gamma_) +
                             ", L=" + std::to_string(problem_.lipschitz_L) + ")");
  // ||I - gamma A_ii|| / gamma; eigenvalues of I - gamma A_ii lie in (0, 1]
  L_.resize(blocks());
  for (int i = 0; i < blocks(); ++i) {
    const int o = partition_.offset(i), len = partition_.size(i);
    MatrixXd M = MatrixXd::Identity(len, len) - gamma_ * problem_.A.block(o, o, len, len);
    if (len == 1)
      L_[i] = std::abs(M(0, 0)) / gamma_;
    else
      L_[i] = symmetric_norm(M) * (1.0 + 1e-8) / gamma_;
  }
}

SurrogateState ForwardBackwardSurrogate::make_state(const VectorXd& x) const {
  if (x.size() != n()) throw ArgumentError("dimension mismatch");
  return SurrogateState{x, {problem_.A.multiply(x)}, {}};
}

void ForwardBackwardSurrogate::update_cache(SurrogateState& s, int i, const VectorXd& h) const {
  problem_.A.add_col_block(partition_.offset(i), partition_.size(i), h, s.cache[0]);
}

VectorXd ForwardBackwardSurrogate::map_B(const SurrogateState& s) const {
  return problem_.psi.evaluate(gamma_, s.x - gamma_ * (s.cache[0] + problem_.b));
}

VectorXd ForwardBackwardSurrogate::coord_grad(int i, const SurrogateState& s) const {
  check_state(s);
  const VectorXd r = s.x - map_B(s);
  const int o = partition_.offset(i), len = partition_.size(i);
  const VectorXd Ar = problem_.A.col_block_dot(o, len, r);  // A symmetric: rows = columns
  return (r.segment(o, len) - gamma_ * Ar) / gamma_;
}

VectorXd ForwardBackwardSurrogate::full_grad(const SurrogateState& s) const {
  check_state(s);
  const VectorXd r = s.x - map_B(s);
  return (r - gamma_ * problem_.A.multiply(r)) / gamma_;
}

double ForwardBackwardSurrogate::value(const SurrogateState& s) const {
  check_state(s);
  const VectorXd g = s.cache[0] + problem_.b;
  const double f = 0.5 * s.x.dot(s.cache[0]) + problem_.b.dot(s.x);
  return f - 0.5 * gamma_ * g.squaredNorm() + moreau_value(problem_.psi, gamma_, s.x - gamma_ * g);
}

}  // namespace smoothcd
