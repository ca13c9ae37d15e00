#pragma once

#include <memory>
#include <vector>

#include "smoothcd/block_partition.hpp"
#include "smoothcd/solvers.hpp"

namespace smoothcd {

// Reference function phi for relative smoothness along coordinates.
class Kernel {
 public:
  explicit Kernel(BlockPartition partition) : partition_(std::move(partition)) {}
  virtual ~Kernel() = default;

  const BlockPartition& partition() const { return partition_; }

  virtual const char* name() const = 0;
  virtual double value(const VectorXd& x) const = 0;
  virtual VectorXd grad(const VectorXd& x) const = 0;
  VectorXd coord_grad(const VectorXd& x, int i) const { return partition_.gather(grad(x), i); }
  // D_phi(x + U_i d, x)
  virtual double coord_bregman(const VectorXd& x, int i, const VectorXd& d) const = 0;
  // argmin_d <g_i, d> + L_i D_phi(x + U_i d, x)
  virtual VectorXd solve_subproblem(const VectorXd& x, int i, const VectorXd& g, double L) const = 0;

 protected:
  BlockPartition partition_;
};

using KernelPtr = std::shared_ptr<const Kernel>;

// phi(x) = ||x||^p / p + ||x||^2 / 2
class PowerKernel : public Kernel {
 public:
  PowerKernel(double p, BlockPartition partition);
  PowerKernel(double p, int n) : PowerKernel(p, BlockPartition::scalar(n)) {}

  double p() const { return p_; }
  const char* name() const override { return "power"; }
  double value(const VectorXd& x) const override;
  VectorXd grad(const VectorXd& x) const override;
  double coord_bregman(const VectorXd& x, int i, const VectorXd& d) const override;
  VectorXd solve_subproblem(const VectorXd& x, int i, const VectorXd& g, double L) const override;

 private:
  double p_;
};

// phi(x) = <Ax, x> / 2 with A symmetric positive definite.
class QuadKernel : public Kernel {
 public:
  QuadKernel(MatrixXd A, BlockPartition partition);
  explicit QuadKernel(MatrixXd A);

  const MatrixXd& A() const { return A_; }
  const char* name() const override { return "quad"; }
  double value(const VectorXd& x) const override;
  VectorXd grad(const VectorXd& x) const override;
  double coord_bregman(const VectorXd& x, int i, const VectorXd& d) const override;
  VectorXd solve_subproblem(const VectorXd& x, int i, const VectorXd& g, double L) const override;

 private:
  MatrixXd A_;
};

double bregman_distance(const Kernel& kernel, const VectorXd& y, const VectorXd& x);

// Unique positive root alpha of a alpha^6 + (2a - b) alpha^4 + (a - 2b) alpha^2 - c (a > 0, b >= 0, c > 0).
double sextic_root(double a, double b, double c);
double sextic_value(double a, double b, double c, double alpha);

VectorXd solve_subproblem_power(const PowerKernel& kernel, const VectorXd& x, int i, const VectorXd& g, double L);
VectorXd solve_subproblem_quadratic(const QuadKernel& kernel, const VectorXd& x, int i, const VectorXd& g, double L);

// ||g_i + L (grad_i phi(x + U_i d) - grad_i phi(x))||
double stationarity_residual(const Kernel& kernel, const VectorXd& x, int i, const VectorXd& g, double L,
                             const VectorXd& d);

// Per-block relative smoothness constants of the quartic problem with respect to the power kernel p = 4:
// L_i(f) + a_coef ||A U_i||^2 (||b|| + ||A||)^2 + 3 ||E U_i||^2 ||E||^2.
VectorXd quartic_lipschitz(const MatrixXd& E, const MatrixXd& A, const VectorXd& b, const VectorXd& L_f,
                           const BlockPartition& partition, double a_coef = 6.0);

// F(x) = x'Af x / 2 + bf'x + ||Ex||^4 / 4 + sum_j (Ax - b)_j^4 / 2
class QuarticProblem {
 public:
  struct State {
    VectorXd x, Ex, r, Afx;
  };

  QuarticProblem(MatrixXd E, MatrixXd A, VectorXd b, MatrixXd Af, VectorXd bf, BlockPartition partition);
  QuarticProblem(MatrixXd E, MatrixXd A, VectorXd b, MatrixXd Af, VectorXd bf);

  int n() const { return partition_.n(); }
  int blocks() const { return partition_.count(); }
  const BlockPartition& partition() const { return partition_; }
  const MatrixXd& E() const { return E_; }
  const MatrixXd& A() const { return A_; }
  const VectorXd& b() const { return b_; }
  const MatrixXd& Af() const { return Af_; }
  const VectorXd& bf() const { return bf_; }
  // Coordinate Lipschitz constants of the quadratic part.
  const VectorXd& smooth_lipschitz() const { return Lf_; }
  // Relative constants with respect to the power kernel p = 4.
  const VectorXd& lipschitz() const { return L_; }

  double value(const VectorXd& x) const;
  VectorXd grad(const VectorXd& x) const;
  VectorXd coord_grad(int i, const VectorXd& x) const;

  State make_state(const VectorXd& x) const;
  double value(const State& st) const;
  VectorXd coord_grad(int i, const State& st) const;
  void apply_step(State& st, int i, const VectorXd& d) const;

 private:
  MatrixXd E_, A_, Af_;
  VectorXd b_, bf_, Lf_, L_;
  BlockPartition partition_;
};

// Random quartic instance: E (m x n), A (m x n) standard normal scaled by 1/sqrt(m), b normal, Af = G'G / m.
QuarticProblem gen_quartic(int n, int m, std::uint64_t seed);

struct RrcdResult : SolveResult {
  double max_stationarity = 0.0;
  // Largest F(x_{k+1}) - F(x_k) + L_i D_phi(x_k, x_{k+1}) relative to 1 + |F(x_k)|.
  double max_descent_violation = 0.0;
};

struct RrcdOptions {
  // Recompute F from scratch before and after every step and record the descent violation.
  bool check_descent = false;
  double stationarity_tol = 1e-8;
};

// Relative randomized coordinate descent; `L` overrides the relative constants when non-empty.
RrcdResult rrcd_run(const QuarticProblem& problem, const Kernel& kernel, const VectorXd& x0, const SolverConfig& cfg,
                    const RrcdOptions& opt = {}, const VectorXd& L = VectorXd());

}  // namespace smoothcd
