#include <Eigen/Eigenvalues>
#include <cmath>

#include "smoothcd/errors.hpp"
#include "smoothcd/smoothing.hpp"

namespace smoothcd {

MoreauSurrogate::MoreauSurrogate(ProxOracle psi, double gamma, BlockPartition partition)
    : SmoothSurrogate(gamma, std::move(partition)), psi_(std::move(psi)) {
  mode_ = Mode::plain;
  L_ = VectorXd::Constant(blocks(), 1.0 / gamma_);
}

MoreauSurrogate::MoreauSurrogate(QuadraticComposite problem, double gamma)
    : SmoothSurrogate(gamma, problem.partition), psi_(problem.psi), problem_(std::move(problem)) {
  L_ = VectorXd::Constant(blocks(), 1.0 / gamma_);
  const auto kind = psi_.kind;
  if (problem_->A.is_diagonal() && psi_.is_separable()) {
    mode_ = Mode::diagonal;
    diag_ = problem_->A.diagonal();
  } else if (kind == ProxKind::zero || kind == ProxKind::l2norm) {
    mode_ = Mode::spectral;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(problem_->A.dense());
    if (es.info() != Eigen::Success) throw FactorizationError("eigendecomposition of A failed");
    V_ = es.eigenvectors();
    eig_ = es.eigenvalues().cwiseMax(0.0);
    Vtb_ = V_.transpose() * problem_->b;
  } else {
    mode_ = Mode::inner;
  }
}

SurrogateState MoreauSurrogate::make_state(const VectorXd& x) const {
  if (x.size() != n()) throw ArgumentError("dimension mismatch");
  SurrogateState s{x, {}, {}};
  if (mode_ == Mode::spectral) s.cache.push_back(V_.transpose() * x);
  return s;
}

void MoreauSurrogate::update_cache(SurrogateState& s, int i, const VectorXd& h) const {
  if (mode_ == Mode::spectral) s.cache[0].noalias() += V_.middleRows(partition_.offset(i), partition_.size(i)).transpose() * h;
}

double MoreauSurrogate::objective(const VectorXd& x) const { return problem_ ? problem_->value(x) : psi_.value(x); }

// Coefficients of prox_{gamma F}(x) in the eigenbasis of A, F = f + lambda ||.||.
// Stationarity gives (A + (1/gamma + lambda/s) I) u = x/gamma - b with s = ||u||,
// so with c = V^T (x/gamma - b) and d_j = eig_j + 1/gamma the radius s solves
// sum_j c_j^2 / (d_j s + lambda)^2 = 1.
VectorXd MoreauSurrogate::spectral_coefficients(const SurrogateState& s) const {
  const VectorXd c = s.cache[0] / gamma_ - Vtb_;
  const VectorXd d = (eig_.array() + 1.0 / gamma_).matrix();
  const double lam = psi_.kind == ProxKind::l2norm ? psi_.lambda : 0.0;
  if (lam == 0.0) return c.cwiseQuotient(d);
  const double cn = c.norm();
  if (cn <= lam) return VectorXd::Zero(c.size());
  auto h = [&](double r, double* dh) {
    double q = 0.0, dq = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      const double den = d[j] * r + lam;
      const double t = c[j] * c[j] / (den * den);
      q += t;
      dq -= 2.0 * t * d[j] / den;
    }
    // h(r) = q^{-1/2} - 1 is increasing and close to linear in r
    const double iq = 1.0 / std::sqrt(q);
    if (dh) *dh = -0.5 * iq * iq * iq * dq;
    return iq - 1.0;
  };
  double lo = 0.0, hi = cn / d.minCoeff();
  double r = hi * (1.0 - lam / cn);
  for (int it = 0; it < 200; ++it) {
    double dh = 0.0;
    const double hv = h(r, &dh);
    if (hv == 0.0) break;
    if (hv > 0.0)
      hi = r;
    else
      lo = r;
    double next = r - hv / dh;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-16 * (1.0 + r)) {
      r = next;
      break;
    }
    r = next;
  }
  VectorXd out(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) out[j] = c[j] * r / (d[j] * r + lam);
  return out;
}

// Accelerated proximal gradient on f(u) + [psi(u) + ||u - x||^2 / (2 gamma)]; the bracket
// is strongly convex with modulus 1/gamma and has a closed-form prox through psi.
VectorXd MoreauSurrogate::inner_prox(const VectorXd& x, const VectorXd& warm) const {
  const auto& p = *problem_;
  const double L = p.lipschitz_L;
  auto g_prox = [&](double t, const VectorXd& y) {
    const double tau = t * gamma_ / (t + gamma_);
    return psi_.evaluate(tau, (gamma_ * y + t * x) / (t + gamma_));
  };
  if (L <= 0.0) {
    last_inner_iterations_ = 1;
    return psi_.evaluate(gamma_, x - gamma_ * p.b);
  }
  const double t = 1.0 / L;
  const double mu = 1.0 / gamma_;
  const double q = t * mu / (1.0 + t * mu);
  const double beta = (1.0 - std::sqrt(q)) / (1.0 + std::sqrt(q));
  VectorXd u = warm.size() == x.size() ? warm : x;
  VectorXd y = u;
  int it = 0;
  for (; it < 20000; ++it) {
    VectorXd next = g_prox(t, y - t * (p.A.multiply(y) + p.b));
    const double step = (next - u).norm();
    y = next + beta * (next - u);
    u = std::move(next);
    if (step <= 1e-14 * (1.0 + u.norm())) break;
  }
  last_inner_iterations_ = it + 1;
  return u;
}

VectorXd MoreauSurrogate::prox(const SurrogateState& s) const {
  check_state(s);
  switch (mode_) {
    case Mode::plain: return psi_.evaluate(gamma_, s.x);
    case Mode::diagonal: {
      const double lam = psi_.kind == ProxKind::l1 ? psi_.lambda : 0.0;
      const VectorXd w = s.x / gamma_ - problem_->b;
      return prox_l1(lam, w).cwiseQuotient((diag_.array() + 1.0 / gamma_).matrix());
    }
    case Mode::spectral: return V_ * spectral_coefficients(s);
    case Mode::inner: {
      VectorXd z = inner_prox(s.x, s.warm);
      s.warm = z;
      return z;
    }
  }
  return s.x;
}

VectorXd MoreauSurrogate::prox_block(int i, const SurrogateState& s) const {
  const int o = partition_.offset(i), len = partition_.size(i);
  switch (mode_) {
    case Mode::plain:
      if (psi_.is_separable()) return psi_.evaluate(gamma_, s.x.segment(o, len));
      return psi_.evaluate(gamma_, s.x).segment(o, len);
    case Mode::diagonal: {
      const double lam = psi_.kind == ProxKind::l1 ? psi_.lambda : 0.0;
      const VectorXd w = s.x.segment(o, len) / gamma_ - problem_->b.segment(o, len);
      return prox_l1(lam, w).cwiseQuotient((diag_.segment(o, len).array() + 1.0 / gamma_).matrix());
    }
    case Mode::spectral: return V_.middleRows(o, len) * spectral_coefficients(s);
    case Mode::inner: return prox(s).segment(o, len);
  }
  return {};
}

VectorXd MoreauSurrogate::coord_grad(int i, const SurrogateState& s) const {
  check_state(s);
  const int o = partition_.offset(i), len = partition_.size(i);
  return (s.x.segment(o, len) - prox_block(i, s)) / gamma_;
}

VectorXd MoreauSurrogate::full_grad(const SurrogateState& s) const { return (s.x - prox(s)) / gamma_; }

double MoreauSurrogate::value(const SurrogateState& s) const {
  const VectorXd z = prox(s);
  const double fz = problem_ ? problem_->smooth_value(z) + (psi_.is_indicator() ? 0.0 : psi_.value(z))
                             : (psi_.is_indicator() ? 0.0 : psi_.value(z));
  return fz + (z - s.x).squaredNorm() / (2.0 * gamma_);
}

}  // namespace smoothcd
