#pragma once

#include <optional>

#include "smoothcd/block_partition.hpp"
#include "smoothcd/matrix.hpp"
#include "smoothcd/prox.hpp"

namespace smoothcd {

// F(x) = 1/2 x^T A x + b^T x + psi(x) with A symmetric psd.
struct QuadraticComposite {
  Matrix A;
  VectorXd b;
  ProxOracle psi;
  double lipschitz_L = 0.0;  // upper bound on the largest eigenvalue of A
  BlockPartition partition;

  QuadraticComposite() = default;
  // Validates symmetry and computes lipschitz_L when it is not supplied.
  QuadraticComposite(Matrix A, VectorXd b, ProxOracle psi, std::optional<BlockPartition> blocks = std::nullopt,
                     double lipschitz = 0.0);

  int n() const { return static_cast<int>(b.size()); }
  double smooth_value(const VectorXd& x) const;
  double value(const VectorXd& x) const { return smooth_value(x) + psi.value(x); }
  VectorXd smooth_grad(const VectorXd& x) const { return A.multiply(x) + b; }
};

enum class DualDomain { simplex, box, unit_ball };

// F(x) = 1/2 x^T Af x + bf^T x + max_{u in Q} <K x - r, u> - phi^T u.
// The three supported (Q, d) pairs are the entropy simplex (l_inf residual),
// the weighted-box Huber pair (l1 residual) and the unit ball (Euclidean norm).
struct SaddleProblem {
  Matrix Af;  // n x n psd, may be the zero matrix
  VectorXd bf;
  Matrix K;  // m x n
  VectorXd r;
  DualDomain domain = DualDomain::box;
  VectorXd row_norms;  // ||e_j^T K||
  BlockPartition partition;

  SaddleProblem() = default;
  SaddleProblem(Matrix Af, VectorXd bf, Matrix K, VectorXd r, DualDomain domain,
                std::optional<BlockPartition> blocks = std::nullopt);

  static SaddleProblem linf_residual(Matrix K, VectorXd r, Matrix Af = {}, VectorXd bf = {});
  static SaddleProblem l1_residual(Matrix K, VectorXd r, Matrix Af = {}, VectorXd bf = {});
  static SaddleProblem smoothed_norm(Matrix K, VectorXd r, Matrix Af = {}, VectorXd bf = {});

  int n() const { return static_cast<int>(K.cols()); }
  int m() const { return static_cast<int>(K.rows()); }
  // max_u d(u) over the dual domain
  double d_bar() const;
  double smooth_value(const VectorXd& x) const;
  // nonsmooth max term evaluated at residual z = K x - r
  double max_term(const VectorXd& z) const;
  double value(const VectorXd& x) const { return smooth_value(x) + max_term(K.multiply(x) - r); }
};

// Difference operator D (n-1 x n) with (Dx)_i = x_{i+1} - x_i, scaled by `scale`.
SparseMatrix difference_matrix(int n, double scale = 1.0);

// Nesterov view of a quadratic composite: l2norm -> smoothed norm of lambda x,
// l1 -> l1 residual of lambda x, tv1d -> l1 residual of lambda D x.
SaddleProblem saddle_view(const QuadraticComposite& p);

}  // namespace smoothcd
