#include <Eigen/Eigenvalues>
#include <cmath>

#include "smoothcd/errors.hpp"
#include "smoothcd/smoothing.hpp"

namespace smoothcd {

NesterovSurrogate::NesterovSurrogate(SaddleProblem problem, double gamma)
    : SmoothSurrogate(gamma, problem.partition), problem_(std::move(problem)) {
  const auto& K = problem_.K;
  const auto& w = problem_.row_norms;
  L_.resize(blocks());
  for (int i = 0; i < blocks(); ++i) {
    const int o = partition_.offset(i), len = partition_.size(i);
    const MatrixXd Af_ii = problem_.Af.block(o, o, len, len);
    const double lf = len == 1 ? std::abs(Af_ii(0, 0)) : symmetric_norm(Af_ii);
    const MatrixXd Kb = K.col_block(o, len);
    double lk = 0.0;
    switch (problem_.domain) {
      case DualDomain::simplex:
        // dual norm of the l1 geometry on the simplex is the max norm
        lk = Kb.rows() ? Kb.rowwise().squaredNorm().maxCoeff() : 0.0;
        break;
      case DualDomain::box: {
        MatrixXd scaled = Kb;
        for (Eigen::Index j = 0; j < Kb.rows(); ++j) scaled.row(j) *= w[j] > 0.0 ? 1.0 / std::sqrt(w[j]) : 0.0;
        lk = len == 1 ? scaled.squaredNorm() : symmetric_norm(scaled.transpose() * scaled);
        break;
      }
      case DualDomain::unit_ball:
        lk = len == 1 ? Kb.squaredNorm() : symmetric_norm(Kb.transpose() * Kb);
        break;
    }
    if (len > 1) lk *= 1.0 + 1e-8;
    L_[i] = lf + lk / gamma_;
  }
  const double floor = 1e-12 * std::max(1.0, L_.maxCoeff());
  for (int i = 0; i < blocks(); ++i) L_[i] = std::max(L_[i], floor);
}

SurrogateState NesterovSurrogate::make_state(const VectorXd& x) const {
  if (x.size() != n()) throw ArgumentError("dimension mismatch");
  return SurrogateState{x, {problem_.Af.multiply(x), problem_.K.multiply(x)}, {}};
}

void NesterovSurrogate::update_cache(SurrogateState& s, int i, const VectorXd& h) const {
  const int o = partition_.offset(i), len = partition_.size(i);
  problem_.Af.add_col_block(o, len, h, s.cache[0]);
  problem_.K.add_col_block(o, len, h, s.cache[1]);
}

VectorXd NesterovSurrogate::dual_point(const SurrogateState& s) const {
  const VectorXd z = s.cache[1] - problem_.r;
  const auto m = z.size();
  VectorXd u(m);
  switch (problem_.domain) {
    case DualDomain::simplex: {
      // softmax over [z; -z] / gamma, returned folded as u+ - u-
      if (m == 0) return u;
      const double top = z.cwiseAbs().maxCoeff();
      const VectorXd ep = ((z.array() - top) / gamma_).exp().matrix();
      const VectorXd em = ((-z.array() - top) / gamma_).exp().matrix();
      const double total = ep.sum() + em.sum();
      u = (ep - em) / total;
      break;
    }
    case DualDomain::box:
      for (Eigen::Index j = 0; j < m; ++j) {
        const double wj = problem_.row_norms[j];
        u[j] = wj > 0.0 ? std::clamp(z[j] / (gamma_ * wj), -1.0, 1.0) : 0.0;
      }
      break;
    case DualDomain::unit_ball: u = z / std::max(gamma_, z.norm()); break;
  }
  return u;
}

double NesterovSurrogate::smoothed_term(const VectorXd& z) const {
  const auto m = z.size();
  switch (problem_.domain) {
    case DualDomain::simplex: {
      if (m == 0) return 0.0;
      const double top = z.cwiseAbs().maxCoeff();
      const double total = ((z.array() - top) / gamma_).exp().sum() + ((-z.array() - top) / gamma_).exp().sum();
      return top + gamma_ * (std::log(total) - std::log(2.0 * m));
    }
    case DualDomain::box: {
      double total = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const double wj = problem_.row_norms[j];
        total += wj > 0.0 ? wj * huber(std::abs(z[j]) / wj, gamma_) : std::abs(z[j]);
      }
      return total;
    }
    case DualDomain::unit_ball: return huber(z.norm(), gamma_);
  }
  return 0.0;
}

VectorXd NesterovSurrogate::coord_grad(int i, const SurrogateState& s) const {
  check_state(s);
  const int o = partition_.offset(i), len = partition_.size(i);
  const VectorXd u = dual_point(s);
  return s.cache[0].segment(o, len) + problem_.bf.segment(o, len) + problem_.K.col_block_dot(o, len, u);
}

VectorXd NesterovSurrogate::full_grad(const SurrogateState& s) const {
  check_state(s);
  return s.cache[0] + problem_.bf + problem_.K.multiply_transpose(dual_point(s));
}

double NesterovSurrogate::value(const SurrogateState& s) const {
  check_state(s);
  return 0.5 * s.x.dot(s.cache[0]) + problem_.bf.dot(s.x) + smoothed_term(s.cache[1] - problem_.r);
}

}  // namespace smoothcd
