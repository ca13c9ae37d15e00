#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <variant>

namespace smoothcd {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;  // column major, i.e. CSC

// Dense or CSC matrix with the handful of products coordinate methods need.
class Matrix {
 public:
  Matrix() : data_(MatrixXd()) {}
  Matrix(MatrixXd dense) : data_(std::move(dense)) {}
  Matrix(SparseMatrix sparse) : data_(std::move(sparse)) { std::get<SparseMatrix>(data_).makeCompressed(); }

  static Matrix identity(int n, double scale = 1.0);
  static Matrix zero(int rows, int cols);

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(data_); }
  Eigen::Index nonzeros() const;

  VectorXd multiply(const VectorXd& x) const;
  VectorXd multiply_transpose(const VectorXd& y) const;
  // out += A[:, c0:c0+len] * h
  void add_col_block(int c0, int len, const VectorXd& h, VectorXd& out) const;
  // A[:, c0:c0+len]^T * v
  VectorXd col_block_dot(int c0, int len, const VectorXd& v) const;
  MatrixXd col_block(int c0, int len) const;
  MatrixXd block(int r0, int c0, int nr, int nc) const;
  VectorXd diagonal() const;
  bool is_diagonal() const;
  MatrixXd dense() const;

  const MatrixXd* as_dense() const { return std::get_if<MatrixXd>(&data_); }
  const SparseMatrix* as_sparse() const { return std::get_if<SparseMatrix>(&data_); }

 private:
  std::variant<MatrixXd, SparseMatrix> data_;
};

// Upper bound on the largest eigenvalue of a symmetric psd matrix:
// exact eigensolve for moderate sizes, otherwise power iteration padded by 1% (a practical,
// not certified, bound).
double lambda_max_bound(const Matrix& A);
// Spectral norm of a general dense matrix (largest singular value).
double spectral_norm(const MatrixXd& A);
// Largest absolute eigenvalue of a small symmetric matrix.
double symmetric_norm(const MatrixXd& S);

}  // namespace smoothcd
