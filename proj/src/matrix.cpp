#include "smoothcd/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "smoothcd/errors.hpp"
#include "smoothcd/rng.hpp"

namespace smoothcd {

Matrix Matrix::identity(int n, double scale) {
  SparseMatrix I(n, n);
  I.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) I.insert(i, i) = scale;
  return Matrix(std::move(I));
}

Matrix Matrix::zero(int rows, int cols) {
  SparseMatrix Z(rows, cols);
  return Matrix(std::move(Z));
}

Eigen::Index Matrix::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, data_);
}

Eigen::Index Matrix::cols() const {
  return std::visit([](const auto& m) { return m.cols(); }, data_);
}

Eigen::Index Matrix::nonzeros() const {
  if (auto* s = as_sparse()) return s->nonZeros();
  return rows() * cols();
}

VectorXd Matrix::multiply(const VectorXd& x) const {
  if (x.size() != cols()) throw ArgumentError("dimension mismatch in matrix product");
  return std::visit([&](const auto& m) -> VectorXd { return m * x; }, data_);
}

VectorXd Matrix::multiply_transpose(const VectorXd& y) const {
  if (y.size() != rows()) throw ArgumentError("dimension mismatch in transposed product");
  return std::visit([&](const auto& m) -> VectorXd { return m.transpose() * y; }, data_);
}

void Matrix::add_col_block(int c0, int len, const VectorXd& h, VectorXd& out) const {
  if (auto* d = as_dense()) {
    out.noalias() += d->middleCols(c0, len) * h;
    return;
  }
  const auto& s = *as_sparse();
  for (int k = 0; k < len; ++k) {
    const double hk = h[k];
    if (hk == 0.0) continue;
    for (SparseMatrix::InnerIterator it(s, c0 + k); it; ++it) out[it.row()] += it.value() * hk;
  }
}

VectorXd Matrix::col_block_dot(int c0, int len, const VectorXd& v) const {
  if (auto* d = as_dense()) return d->middleCols(c0, len).transpose() * v;
  const auto& s = *as_sparse();
  VectorXd out(len);
  for (int k = 0; k < len; ++k) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(s, c0 + k); it; ++it) acc += it.value() * v[it.row()];
    out[k] = acc;
  }
  return out;
}

MatrixXd Matrix::col_block(int c0, int len) const {
  if (auto* d = as_dense()) return d->middleCols(c0, len);
  return MatrixXd(as_sparse()->middleCols(c0, len));
}

MatrixXd Matrix::block(int r0, int c0, int nr, int nc) const {
  if (auto* d = as_dense()) return d->block(r0, c0, nr, nc);
  return MatrixXd(as_sparse()->block(r0, c0, nr, nc));
}

VectorXd Matrix::diagonal() const {
  return std::visit([](const auto& m) -> VectorXd { return m.diagonal(); }, data_);
}

bool Matrix::is_diagonal() const {
  if (rows() != cols()) return false;
  if (auto* d = as_dense()) {
    for (Eigen::Index j = 0; j < d->cols(); ++j)
      for (Eigen::Index i = 0; i < d->rows(); ++i)
        if (i != j && (*d)(i, j) != 0.0) return false;
    return true;
  }
  const auto& s = *as_sparse();
  for (int j = 0; j < s.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(s, j); it; ++it)
      if (it.row() != j && it.value() != 0.0) return false;
  return true;
}

MatrixXd Matrix::dense() const {
  if (auto* d = as_dense()) return *d;
  return MatrixXd(*as_sparse());
}

double lambda_max_bound(const Matrix& A) {
  if (A.rows() != A.cols()) throw ArgumentError("lambda_max_bound needs a square matrix");
  const auto n = A.rows();
  if (n == 0) return 0.0;
  if (A.is_diagonal()) return std::max(0.0, A.diagonal().maxCoeff());
  if (n <= 2000) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A.dense(), Eigen::EigenvaluesOnly);
    const double top = std::max(0.0, es.eigenvalues().maxCoeff());
    return top * (1.0 + 1e-10) + 1e-300;
  }
  // power iteration; the Rayleigh quotient is a lower estimate so pad generously
  Pcg32 rng(12345, 7);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < 1000; ++it) {
    VectorXd w = A.multiply(v);
    const double next = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (std::abs(next - est) <= 1e-10 * std::abs(next)) {
      est = next;
      break;
    }
    est = next;
  }
  return est * 1.01;
}

double spectral_norm(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(A);
  return svd.singularValues()[0];
}

double symmetric_norm(const MatrixXd& S) {
  if (S.size() == 0) return 0.0;
  if (S.rows() == 1) return std::abs(S(0, 0));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace smoothcd
