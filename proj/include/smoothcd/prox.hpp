#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace smoothcd {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Groups = std::vector<std::vector<int>>;

VectorXd prox_euclidean_norm(double t, const VectorXd& x);
VectorXd prox_l1(double t, const VectorXd& x);
VectorXd prox_group_norm(double t, const VectorXd& x, const Groups& groups);
VectorXd project_l2_ball(double r, const VectorXd& x);
VectorXd project_l2_ball(double r, const VectorXd& c, const VectorXd& x);
VectorXd project_l1_ball(double r, const VectorXd& c, const VectorXd& x);
// Projection onto {u >= 0, sum u = s}.
VectorXd project_simplex(const VectorXd& x, double s = 1.0);
VectorXd project_hyperplane_box(const VectorXd& a, double b, const VectorXd& l, const VectorXd& u, const VectorXd& x);
VectorXd prox_tv_1d(double t, const VectorXd& y);
// prox of lambda * ||x||^(r+2) with step gamma.
VectorXd prox_power_norm(double gamma, double r, const VectorXd& x, double lambda = 1.0);

// Projection onto {u : A u = b} with a cached Cholesky factor of A A^T.
class AffineProjector {
 public:
  AffineProjector(MatrixXd A, VectorXd b);
  VectorXd project(const VectorXd& x) const;
  double residual(const VectorXd& x) const { return (A_ * x - b_).norm(); }
  const MatrixXd& A() const { return A_; }
  const VectorXd& b() const { return b_; }

 private:
  MatrixXd A_;
  VectorXd b_;
  Eigen::LLT<MatrixXd> llt_;
};

VectorXd project_affine(const MatrixXd& A, const VectorXd& b, const VectorXd& x);

enum class ProxKind { zero, l1, l2norm, group, ball2, ball1, simplex, hyperbox, affine, tv1d, power };

std::string to_string(ProxKind kind);
ProxKind prox_kind_from_string(const std::string& name);

// A convex function psi together with its proximal map.
struct ProxOracle {
  ProxKind kind = ProxKind::zero;
  double lambda = 1.0;  // weight of norms / tv / power
  double radius = 1.0;  // balls, simplex sum
  VectorXd center;      // balls, empty means origin
  Groups groups;
  VectorXd a, lower, upper;  // hyperbox: a^T x = beta, lower <= x <= upper
  double beta = 0.0;
  std::shared_ptr<const AffineProjector> affine;
  double power = 0.0;  // exponent r in ||x||^(r+2)

  static ProxOracle zero();
  static ProxOracle l1(double lambda);
  static ProxOracle l2norm(double lambda);
  static ProxOracle group(double lambda, Groups groups);
  static ProxOracle ball2(double r, VectorXd c = {});
  static ProxOracle ball1(double r, VectorXd c = {});
  static ProxOracle simplex(double s = 1.0);
  static ProxOracle hyperbox(VectorXd a, double b, VectorXd l, VectorXd u);
  static ProxOracle affine_set(MatrixXd A, VectorXd b);
  static ProxOracle tv1d(double lambda);
  static ProxOracle power_norm(double r, double lambda = 1.0);

  VectorXd evaluate(double gamma, const VectorXd& x) const;
  // psi(x); +inf outside the set for indicators (feasibility tolerance 1e-9).
  double value(const VectorXd& x) const;
  bool is_indicator() const;
  bool is_separable() const { return kind == ProxKind::zero || kind == ProxKind::l1; }
};

// Moreau value psi^gamma(x) = psi(z) + ||z - x||^2 / (2 gamma), z = prox; z is returned through `z_out`.
double moreau_value(const ProxOracle& psi, double gamma, const VectorXd& x, VectorXd* z_out = nullptr);

}  // namespace smoothcd
