#include <Eigen/Cholesky>

#include "smoothcd/errors.hpp"
#include "smoothcd/smoothing.hpp"

namespace smoothcd {

DouglasRachfordSurrogate::DouglasRachfordSurrogate(QuadraticComposite problem, double gamma)
    : SmoothSurrogate(gamma, problem.partition), problem_(std::move(problem)) {
  if (!(gamma_ * problem_.lipschitz_L < 1.0))
    throw ConfigurationError("Douglas-Rachford envelope needs gamma * L < 1 (gamma=" + std::to_string(gamma_) +
                             ", L=" + std::to_string(problem_.lipschitz_L) + ")");
  const int nn = n();
  if (problem_.A.is_diagonal()) {
    const VectorXd d = (1.0 + gamma_ * problem_.A.diagonal().array()).inverse().matrix();
    SparseMatrix H(nn, nn);
    H.reserve(Eigen::VectorXi::Constant(nn, 1));
    for (int j = 0; j < nn; ++j) H.insert(j, j) = d[j];
    H_ = Matrix(std::move(H));
  } else {
    MatrixXd M = MatrixXd::Identity(nn, nn) + gamma_ * problem_.A.dense();
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw FactorizationError("I + gamma A is not positive definite");
    MatrixXd H = llt.solve(MatrixXd::Identity(nn, nn));
    H = 0.5 * (H + H.transpose());
    H_ = Matrix(std::move(H));
  }
  Hb_ = H_.multiply(problem_.b);

  // L_i = ||(P + P^2)_ii|| / gamma with P = 2H - I
  L_.resize(blocks());
  for (int i = 0; i < blocks(); ++i) {
    const int o = partition_.offset(i), len = partition_.size(i);
    MatrixXd Pcols = 2.0 * H_.col_block(o, len);
    Pcols.middleRows(o, len) -= MatrixXd::Identity(len, len);
    MatrixXd S = Pcols.middleRows(o, len) + Pcols.transpose() * Pcols;
    if (len == 1)
      L_[i] = std::abs(S(0, 0)) / gamma_;
    else
      L_[i] = symmetric_norm(0.5 * (S + S.transpose())) * (1.0 + 1e-8) / gamma_;
  }
}

SurrogateState DouglasRachfordSurrogate::make_state(const VectorXd& x) const {
  if (x.size() != n()) throw ArgumentError("dimension mismatch");
  return SurrogateState{x, {H_.multiply(x)}, {}};
}

void DouglasRachfordSurrogate::update_cache(SurrogateState& s, int i, const VectorXd& h) const {
  H_.add_col_block(partition_.offset(i), partition_.size(i), h, s.cache[0]);
}

VectorXd DouglasRachfordSurrogate::map_C(const SurrogateState& s) const { return u_of(s); }

VectorXd DouglasRachfordSurrogate::map_B(const SurrogateState& s) const {
  return problem_.psi.evaluate(gamma_, 2.0 * u_of(s) - s.x);
}

VectorXd DouglasRachfordSurrogate::coord_grad(int i, const SurrogateState& s) const {
  check_state(s);
  const VectorXd u = u_of(s);
  const VectorXd G = u - problem_.psi.evaluate(gamma_, 2.0 * u - s.x);
  const int o = partition_.offset(i), len = partition_.size(i);
  return (2.0 * H_.col_block_dot(o, len, G) - G.segment(o, len)) / gamma_;
}

VectorXd DouglasRachfordSurrogate::full_grad(const SurrogateState& s) const {
  check_state(s);
  const VectorXd u = u_of(s);
  const VectorXd G = u - problem_.psi.evaluate(gamma_, 2.0 * u - s.x);
  return (2.0 * H_.multiply(G) - G) / gamma_;
}

double DouglasRachfordSurrogate::value(const SurrogateState& s) const {
  check_state(s);
  const VectorXd u = u_of(s);
  const VectorXd d = s.x - u;
  const double f_env = problem_.smooth_value(u) + d.squaredNorm() / (2.0 * gamma_);
  return f_env - d.squaredNorm() / gamma_ + moreau_value(problem_.psi, gamma_, 2.0 * u - s.x);
}

}  // namespace smoothcd
