#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smoothcd/block_partition.hpp"
#include "smoothcd/problem.hpp"

namespace smoothcd {

// Iterate plus cached linear images of it (A x, H x, K x, ...). Because every
// cache is linear in x, states combine exactly: (a s + b t).cache = a s.cache + b t.cache.
struct SurrogateState {
  VectorXd x;
  std::vector<VectorXd> cache;
  mutable VectorXd warm;  // warm start for inner iterative prox solves; not combined
};

SurrogateState combine(double a, const SurrogateState& s, double b, const SurrogateState& t);

// Smooth approximation F_gamma of a nonsmooth convex F.
//   F(B(x)) - gamma D <= F_gamma(x) <= F(C(x)),
// with block-coordinate Lipschitz gradients (constants L_i).
class SmoothSurrogate {
 public:
  SmoothSurrogate(double gamma, BlockPartition partition);
  virtual ~SmoothSurrogate() = default;

  virtual std::string name() const = 0;
  double gamma() const { return gamma_; }
  const BlockPartition& partition() const { return partition_; }
  int n() const { return partition_.n(); }
  int blocks() const { return partition_.count(); }
  const VectorXd& lipschitz() const { return L_; }
  double coord_lipschitz(int i) const { return L_[i]; }
  // Rescales the published constants; used by the check suite mutation test.
  void scale_lipschitz(double factor) { L_ *= factor; }

  virtual SurrogateState make_state(const VectorXd& x) const = 0;
  // x <- x + U_i h with all caches updated incrementally.
  virtual void apply_step(SurrogateState& s, int i, const VectorXd& h) const;
  virtual VectorXd coord_grad(int i, const SurrogateState& s) const = 0;
  virtual VectorXd full_grad(const SurrogateState& s) const = 0;
  virtual double value(const SurrogateState& s) const = 0;
  virtual VectorXd map_B(const SurrogateState& s) const = 0;
  virtual VectorXd map_C(const SurrogateState& s) const = 0;
  virtual double gap_D() const = 0;
  // Original nonsmooth objective F.
  virtual double objective(const VectorXd& x) const = 0;
  virtual bool inexact() const { return false; }

  double value_at(const VectorXd& x) const { return value(make_state(x)); }
  VectorXd grad_at(const VectorXd& x) const { return full_grad(make_state(x)); }
  VectorXd coord_grad_at(int i, const VectorXd& x) const { return coord_grad(i, make_state(x)); }
  VectorXd B_at(const VectorXd& x) const { return map_B(make_state(x)); }
  VectorXd C_at(const VectorXd& x) const { return map_C(make_state(x)); }

 protected:
  // Called by apply_step after x has moved; h is the block displacement.
  virtual void update_cache(SurrogateState& s, int i, const VectorXd& h) const;
  void check_state(const SurrogateState& s) const;

  double gamma_;
  BlockPartition partition_;
  VectorXd L_;
};

using SurrogatePtr = std::shared_ptr<SmoothSurrogate>;

// Moreau envelope of F: either a bare prox oracle, or a quadratic composite
// whose prox is computed in closed form (diagonal A with separable psi, or
// psi in {zero, l2norm} through an eigendecomposition of A) or, failing that,
// by an inner accelerated proximal gradient loop (flagged inexact).
class MoreauSurrogate : public SmoothSurrogate {
 public:
  MoreauSurrogate(ProxOracle psi, double gamma, BlockPartition partition);
  MoreauSurrogate(QuadraticComposite problem, double gamma);

  std::string name() const override { return "moreau"; }
  SurrogateState make_state(const VectorXd& x) const override;
  VectorXd coord_grad(int i, const SurrogateState& s) const override;
  VectorXd full_grad(const SurrogateState& s) const override;
  double value(const SurrogateState& s) const override;
  VectorXd map_B(const SurrogateState& s) const override { return prox(s); }
  VectorXd map_C(const SurrogateState& s) const override { return s.x; }
  double gap_D() const override { return 0.0; }
  double objective(const VectorXd& x) const override;
  bool inexact() const override { return mode_ == Mode::inner; }

  // prox_{gamma F}(x)
  VectorXd prox(const SurrogateState& s) const;
  int inner_iterations() const { return last_inner_iterations_; }

 protected:
  void update_cache(SurrogateState& s, int i, const VectorXd& h) const override;

 private:
  enum class Mode { plain, diagonal, spectral, inner };
  VectorXd prox_block(int i, const SurrogateState& s) const;
  // spectral mode: coefficients in the eigenbasis
  VectorXd spectral_coefficients(const SurrogateState& s) const;
  VectorXd inner_prox(const VectorXd& x, const VectorXd& warm) const;

  Mode mode_ = Mode::plain;
  ProxOracle psi_;
  std::optional<QuadraticComposite> problem_;
  VectorXd diag_;
  MatrixXd V_;
  VectorXd eig_;
  VectorXd Vtb_;
  mutable int last_inner_iterations_ = 0;
};

// Forward-backward envelope of 1/2 x^T A x + b^T x + psi, requires gamma L < 1.
class ForwardBackwardSurrogate : public SmoothSurrogate {
 public:
  ForwardBackwardSurrogate(QuadraticComposite problem, double gamma);

  std::string name() const override { return "fb"; }
  SurrogateState make_state(const VectorXd& x) const override;
  VectorXd coord_grad(int i, const SurrogateState& s) const override;
  VectorXd full_grad(const SurrogateState& s) const override;
  double value(const SurrogateState& s) const override;
  VectorXd map_B(const SurrogateState& s) const override;
  VectorXd map_C(const SurrogateState& s) const override { return s.x; }
  double gap_D() const override { return 0.0; }
  double objective(const VectorXd& x) const override { return problem_.value(x); }
  const QuadraticComposite& problem() const { return problem_; }

 protected:
  void update_cache(SurrogateState& s, int i, const VectorXd& h) const override;

 private:
  QuadraticComposite problem_;
};

// Douglas-Rachford envelope of 1/2 x^T A x + b^T x + psi, requires gamma L < 1.
class DouglasRachfordSurrogate : public SmoothSurrogate {
 public:
  DouglasRachfordSurrogate(QuadraticComposite problem, double gamma);

  std::string name() const override { return "dr"; }
  SurrogateState make_state(const VectorXd& x) const override;
  VectorXd coord_grad(int i, const SurrogateState& s) const override;
  VectorXd full_grad(const SurrogateState& s) const override;
  double value(const SurrogateState& s) const override;
  VectorXd map_B(const SurrogateState& s) const override;
  VectorXd map_C(const SurrogateState& s) const override;
  double gap_D() const override { return 0.0; }
  double objective(const VectorXd& x) const override { return problem_.value(x); }
  const Matrix& H() const { return H_; }

 protected:
  void update_cache(SurrogateState& s, int i, const VectorXd& h) const override;

 private:
  VectorXd u_of(const SurrogateState& s) const { return s.cache[0] - gamma_ * Hb_; }
  QuadraticComposite problem_;
  Matrix H_;  // (I + gamma A)^-1, diagonal or dense
  VectorXd Hb_;
};

// Nesterov smoothing of a saddle problem with prox-function strong convexity 1.
class NesterovSurrogate : public SmoothSurrogate {
 public:
  NesterovSurrogate(SaddleProblem problem, double gamma);

  std::string name() const override { return "ns"; }
  SurrogateState make_state(const VectorXd& x) const override;
  VectorXd coord_grad(int i, const SurrogateState& s) const override;
  VectorXd full_grad(const SurrogateState& s) const override;
  double value(const SurrogateState& s) const override;
  VectorXd map_B(const SurrogateState& s) const override { return s.x; }
  VectorXd map_C(const SurrogateState& s) const override { return s.x; }
  double gap_D() const override { return problem_.d_bar(); }
  double objective(const VectorXd& x) const override { return problem_.value(x); }
  const SaddleProblem& problem() const { return problem_; }
  // maximizer u_gamma(x) of the smoothed inner problem
  VectorXd dual_point(const SurrogateState& s) const;

 protected:
  void update_cache(SurrogateState& s, int i, const VectorXd& h) const override;

 private:
  double smoothed_term(const VectorXd& z) const;
  SaddleProblem problem_;
};

// Smoothed Huber function phi_gamma(t) for t >= 0.
double huber(double t, double gamma);

}  // namespace smoothcd
