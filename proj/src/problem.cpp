#include "smoothcd/problem.hpp"

#include <cmath>

#include "smoothcd/errors.hpp"

namespace smoothcd {

QuadraticComposite::QuadraticComposite(Matrix A_, VectorXd b_, ProxOracle psi_, std::optional<BlockPartition> blocks,
                                       double lipschitz)
    : A(std::move(A_)), b(std::move(b_)), psi(std::move(psi_)) {
  if (A.rows() != A.cols()) throw ArgumentError("A must be square");
  if (A.rows() != b.size()) throw ArgumentError("A and b dimensions differ");
  partition = blocks ? *blocks : BlockPartition::scalar(static_cast<int>(b.size()));
  if (partition.n() != b.size()) throw ArgumentError("block partition does not match the problem dimension");
  // symmetry check, relative to the largest entry
  if (auto* d = A.as_dense()) {
    const double scale = std::max(1.0, d->cwiseAbs().maxCoeff());
    if ((*d - d->transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ArgumentError("A is not symmetric");
  } else {
    const auto& s = *A.as_sparse();
    SparseMatrix diff = s - SparseMatrix(s.transpose());
    double worst = 0.0, scale = 1.0;
    for (int j = 0; j < s.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(s, j); it; ++it) scale = std::max(scale, std::abs(it.value()));
    for (int j = 0; j < diff.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(diff, j); it; ++it) worst = std::max(worst, std::abs(it.value()));
    if (worst > 1e-12 * scale) throw ArgumentError("A is not symmetric");
  }
  lipschitz_L = lipschitz > 0.0 ? lipschitz : lambda_max_bound(A);
}

double QuadraticComposite::smooth_value(const VectorXd& x) const { return 0.5 * x.dot(A.multiply(x)) + b.dot(x); }

SaddleProblem::SaddleProblem(Matrix Af_, VectorXd bf_, Matrix K_, VectorXd r_, DualDomain domain_,
                             std::optional<BlockPartition> blocks)
    : Af(std::move(Af_)), bf(std::move(bf_)), K(std::move(K_)), r(std::move(r_)), domain(domain_) {
  const int n = static_cast<int>(K.cols());
  if (r.size() != K.rows()) throw ArgumentError("residual offset length must match rows of K");
  if (Af.rows() == 0) Af = Matrix::zero(n, n);
  if (bf.size() == 0) bf = VectorXd::Zero(n);
  if (Af.rows() != n || Af.cols() != n || bf.size() != n) throw ArgumentError("smooth part dimensions do not match K");
  partition = blocks ? *blocks : BlockPartition::scalar(n);
  if (partition.n() != n) throw ArgumentError("block partition does not match the problem dimension");
  row_norms.resize(K.rows());
  if (auto* d = K.as_dense()) {
    row_norms = d->rowwise().norm();
  } else {
    row_norms.setZero();
    const auto& s = *K.as_sparse();
    for (int j = 0; j < s.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(s, j); it; ++it) row_norms[it.row()] += it.value() * it.value();
    row_norms = row_norms.cwiseSqrt();
  }
}

SaddleProblem SaddleProblem::linf_residual(Matrix K, VectorXd r, Matrix Af, VectorXd bf) {
  return SaddleProblem(std::move(Af), std::move(bf), std::move(K), std::move(r), DualDomain::simplex);
}

SaddleProblem SaddleProblem::l1_residual(Matrix K, VectorXd r, Matrix Af, VectorXd bf) {
  return SaddleProblem(std::move(Af), std::move(bf), std::move(K), std::move(r), DualDomain::box);
}

SaddleProblem SaddleProblem::smoothed_norm(Matrix K, VectorXd r, Matrix Af, VectorXd bf) {
  return SaddleProblem(std::move(Af), std::move(bf), std::move(K), std::move(r), DualDomain::unit_ball);
}

double SaddleProblem::d_bar() const {
  switch (domain) {
    case DualDomain::simplex: return std::log(2.0 * m());
    case DualDomain::box: return 0.5 * row_norms.sum();
    case DualDomain::unit_ball: return 0.5;
  }
  return 0.0;
}

double SaddleProblem::smooth_value(const VectorXd& x) const { return 0.5 * x.dot(Af.multiply(x)) + bf.dot(x); }

double SaddleProblem::max_term(const VectorXd& z) const {
  switch (domain) {
    case DualDomain::simplex: return z.size() ? z.cwiseAbs().maxCoeff() : 0.0;
    case DualDomain::box: return z.lpNorm<1>();
    case DualDomain::unit_ball: return z.norm();
  }
  return 0.0;
}

SparseMatrix difference_matrix(int n, double scale) {
  if (n < 2) throw ArgumentError("difference matrix needs n >= 2");
  SparseMatrix D(n - 1, n);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * (n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    t.emplace_back(i, i, -scale);
    t.emplace_back(i, i + 1, scale);
  }
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SaddleProblem saddle_view(const QuadraticComposite& p) {
  const int n = p.n();
  const double lam = p.psi.lambda;
  SaddleProblem out;
  switch (p.psi.kind) {
    case ProxKind::l2norm:
      out = SaddleProblem::smoothed_norm(Matrix::identity(n, lam), VectorXd::Zero(n), p.A, p.b);
      break;
    case ProxKind::l1:
      out = SaddleProblem::l1_residual(Matrix::identity(n, lam), VectorXd::Zero(n), p.A, p.b);
      break;
    case ProxKind::tv1d:
      out = SaddleProblem::l1_residual(Matrix(difference_matrix(n, lam)), VectorXd::Zero(n - 1), p.A, p.b);
      break;
    default:
      throw ConfigurationError("no Nesterov view for psi kind '" + to_string(p.psi.kind) +
                               "' (supported: l2norm, l1, tv1d)");
  }
  out.partition = p.partition;
  return out;
}

}  // namespace smoothcd
