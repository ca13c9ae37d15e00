#include "smoothcd/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smoothcd/errors.hpp"
#include "smoothcd/rng.hpp"

namespace smoothcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;

// theta such that sum_i max(v_i - theta, 0) = z, z > 0.
// Randomized pivoting in the style of Duchi et al.: expected linear time.
double pivot_threshold(std::vector<double> v, double z) {
  Pcg32 rng(0x5eed, 3);
  std::size_t lo = 0, hi = v.size();  // active range [lo, hi)
  double s = 0.0;
  double rho = 0.0;
  while (lo < hi) {
    const std::size_t pick = lo + rng.below(static_cast<std::uint32_t>(hi - lo));
    const double pivot = v[pick];
    // move entries >= pivot to the front of the active range
    auto mid = std::partition(v.begin() + lo, v.begin() + hi, [pivot](double t) { return t >= pivot; });
    const std::size_t g_end = static_cast<std::size_t>(mid - v.begin());
    double ds = 0.0;
    for (std::size_t k = lo; k < g_end; ++k) ds += v[k];
    const double drho = static_cast<double>(g_end - lo);
    if ((s + ds) - (rho + drho) * pivot < z) {
      s += ds;
      rho += drho;
      lo = g_end;
    } else {
      // drop one copy of the pivot, keep the strictly larger part
      auto it = std::find(v.begin() + lo, v.begin() + g_end, pivot);
      std::iter_swap(it, v.begin() + g_end - 1);
      hi = g_end - 1;
    }
  }
  return (s - z) / rho;
}

double clip(double v, double l, double u) { return std::min(std::max(v, l), u); }

}  // namespace

VectorXd prox_euclidean_norm(double t, const VectorXd& x) {
  if (t < 0.0) throw ArgumentError("prox threshold must be nonnegative");
  const double nx = x.norm();
  if (nx <= t) return VectorXd::Zero(x.size());
  return (1.0 - t / nx) * x;
}

VectorXd prox_l1(double t, const VectorXd& x) {
  if (t < 0.0) throw ArgumentError("prox threshold must be nonnegative");
  VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]) - t;
    out[i] = a > 0.0 ? std::copysign(a, x[i]) : 0.0;
  }
  return out;
}

static void check_groups(const Groups& groups, Eigen::Index n) {
  std::vector<char> seen(n, 0);
  for (const auto& g : groups)
    for (int j : g) {
      if (j < 0 || j >= n) throw ArgumentError("group index out of range");
      if (seen[j]) throw ArgumentError("groups overlap at index " + std::to_string(j));
      seen[j] = 1;
    }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ArgumentError("groups must cover every index");
}

VectorXd prox_group_norm(double t, const VectorXd& x, const Groups& groups) {
  check_groups(groups, x.size());
  VectorXd out = x;
  for (const auto& g : groups) {
    double sq = 0.0;
    for (int j : g) sq += x[j] * x[j];
    const double ng = std::sqrt(sq);
    const double scale = ng <= t ? 0.0 : 1.0 - t / ng;
    for (int j : g) out[j] = scale * x[j];
  }
  return out;
}

VectorXd project_l2_ball(double r, const VectorXd& x) {
  if (!(r > 0.0)) throw ArgumentError("ball radius must be positive");
  const double nx = x.norm();
  if (nx <= r) return x;
  return (r / nx) * x;
}

VectorXd project_l2_ball(double r, const VectorXd& c, const VectorXd& x) {
  if (c.size() == 0) return project_l2_ball(r, x);
  return c + project_l2_ball(r, x - c);
}

VectorXd project_l1_ball(double r, const VectorXd& c, const VectorXd& x) {
  if (!(r > 0.0)) throw ArgumentError("ball radius must be positive");
  VectorXd d = c.size() == 0 ? x : VectorXd(x - c);
  if (d.lpNorm<1>() <= r) return x;
  std::vector<double> v(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) v[i] = std::abs(d[i]);
  const double theta = pivot_threshold(std::move(v), r);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double a = std::abs(d[i]) - theta;
    d[i] = a > 0.0 ? std::copysign(a, d[i]) : 0.0;
  }
  return c.size() == 0 ? d : VectorXd(c + d);
}

VectorXd project_simplex(const VectorXd& x, double s) {
  if (!(s > 0.0)) throw ArgumentError("simplex sum must be positive");
  if (x.size() == 0) throw ArgumentError("empty vector");
  std::vector<double> v(x.data(), x.data() + x.size());
  const double theta = pivot_threshold(std::move(v), s);
  return (x.array() - theta).max(0.0).matrix();
}

VectorXd project_hyperplane_box(const VectorXd& a, double b, const VectorXd& l, const VectorXd& u, const VectorXd& x) {
  const auto n = x.size();
  if (a.size() != n || l.size() != n || u.size() != n) throw ArgumentError("dimension mismatch in hyperplane/box data");
  if ((l.array() > u.array()).any()) throw InfeasibleError("box has lower > upper");
  auto at = [&](double mu) {
    VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = clip(x[i] - mu * a[i], l[i], u[i]);
    return y;
  };
  double lo_val = 0.0, hi_val = 0.0;  // range of a^T y over the box
  double mu_lo = 0.0, mu_hi = 0.0;
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    lo_val += a[i] > 0 ? a[i] * l[i] : a[i] * u[i];
    hi_val += a[i] > 0 ? a[i] * u[i] : a[i] * l[i];
    const double b1 = (x[i] - l[i]) / a[i], b2 = (x[i] - u[i]) / a[i];
    if (!any) {
      mu_lo = std::min(b1, b2);
      mu_hi = std::max(b1, b2);
      any = true;
    } else {
      mu_lo = std::min({mu_lo, b1, b2});
      mu_hi = std::max({mu_hi, b1, b2});
    }
  }
  const double tol = kFeasTol * (1.0 + std::abs(b));
  if (!any) {
    if (std::abs(b) > tol) throw InfeasibleError("hyperplane with a = 0 and b != 0");
    return at(0.0);
  }
  if (b < lo_val - tol || b > hi_val + tol) throw InfeasibleError("hyperplane does not meet the box");
  // phi(mu) = a^T y(mu) is nonincreasing, piecewise linear
  auto phi = [&](double mu) { return a.dot(at(mu)); };
  mu_lo -= 1.0;
  mu_hi += 1.0;
  for (int it = 0; it < 200 && mu_hi - mu_lo > 1e-12 * (1.0 + std::abs(mu_lo) + std::abs(mu_hi)); ++it) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (phi(mid) > b)
      mu_lo = mid;
    else
      mu_hi = mid;
  }
  // the final interval rarely holds a breakpoint; interpolate the linear piece
  const double p_lo = phi(mu_lo), p_hi = phi(mu_hi);
  double mu = 0.5 * (mu_lo + mu_hi);
  if (p_lo != p_hi) mu = mu_lo + (p_lo - b) / (p_lo - p_hi) * (mu_hi - mu_lo);
  return at(std::clamp(mu, mu_lo, mu_hi));
}

AffineProjector::AffineProjector(MatrixXd A, VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw ArgumentError("affine constraint: rows of A must match b");
  if (A_.rows() == 0) throw ArgumentError("affine constraint needs at least one row");
  MatrixXd G = A_ * A_.transpose();
  llt_.compute(G);
  if (llt_.info() != Eigen::Success) throw FactorizationError("A A^T is not positive definite (rank deficient A)");
  const VectorXd d = llt_.matrixL().toDenseMatrix().diagonal();
  if (d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff())) throw FactorizationError("A A^T is numerically singular");
}

VectorXd AffineProjector::project(const VectorXd& x) const {
  if (x.size() != A_.cols()) throw ArgumentError("dimension mismatch in affine projection");
  const VectorXd r = A_ * x - b_;
  return x - A_.transpose() * llt_.solve(r);
}

VectorXd project_affine(const MatrixXd& A, const VectorXd& b, const VectorXd& x) { return AffineProjector(A, b).project(x); }

VectorXd prox_tv_1d(double t, const VectorXd& y) {
  if (t < 0.0) throw ArgumentError("tv weight must be nonnegative");
  const int width = static_cast<int>(y.size());
  VectorXd out(width);
  if (width == 0) return out;
  if (t == 0.0) return y;
  const double lambda = t;
  int k = 0, k0 = 0;
  double umin = lambda, umax = -lambda;
  double vmin = y[0] - lambda, vmax = y[0] + lambda;
  int kplus = 0, kminus = 0;
  const double twolambda = 2.0 * lambda;
  const double minlambda = -lambda;
  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do out[k0++] = vmin;
        while (k0 <= kminus);
        kminus = k = k0;
        vmin = y[k];
        umin = lambda;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do out[k0++] = vmax;
        while (k0 <= kplus);
        kplus = k = k0;
        vmax = y[k];
        umax = minlambda;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / (k - k0 + 1);
        do out[k0++] = vmin;
        while (k0 <= k);
        return out;
      }
    }
    if ((umin += y[k + 1] - vmin) < minlambda) {
      do out[k0++] = vmin;
      while (k0 <= kminus);
      kplus = kminus = k = k0;
      vmin = y[k];
      vmax = vmin + twolambda;
      umin = lambda;
      umax = minlambda;
    } else if ((umax += y[k + 1] - vmax) > lambda) {
      do out[k0++] = vmax;
      while (k0 <= kplus);
      kplus = kminus = k = k0;
      vmax = y[k];
      vmin = vmax - twolambda;
      umin = lambda;
      umax = minlambda;
    } else {
      ++k;
      if (umin >= lambda) {
        kminus = k;
        vmin += (umin - lambda) / (kminus - k0 + 1);
        umin = lambda;
      }
      if (umax <= minlambda) {
        kplus = k;
        vmax += (umax + lambda) / (kplus - k0 + 1);
        umax = minlambda;
      }
    }
  }
}

VectorXd prox_power_norm(double gamma, double r, const VectorXd& x, double lambda) {
  if (!(gamma > 0.0) || r < 0.0 || lambda < 0.0) throw ArgumentError("prox_power_norm needs gamma > 0, r >= 0, lambda >= 0");
  const double nx = x.norm();
  if (nx == 0.0) return VectorXd::Zero(x.size());
  // solve t + c t^(r+1) = 1 on (0, 1]; the left side is increasing and convex
  const double c = gamma * lambda * (r + 2.0) * std::pow(nx, r);
  auto f = [&](double t) { return t + c * std::pow(t, r + 1.0) - 1.0; };
  double lo = 0.0, hi = 1.0, t = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double ft = f(t);
    if (ft == 0.0) break;
    if (ft > 0.0)
      hi = t;
    else
      lo = t;
    const double df = 1.0 + c * (r + 1.0) * std::pow(t, r);
    double next = t - ft / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * t) {
      t = next;
      break;
    }
    t = next;
  }
  return t * x;
}

std::string to_string(ProxKind kind) {
  switch (kind) {
    case ProxKind::zero: return "zero";
    case ProxKind::l1: return "l1";
    case ProxKind::l2norm: return "l2norm";
    case ProxKind::group: return "group";
    case ProxKind::ball2: return "ball2";
    case ProxKind::ball1: return "ball1";
    case ProxKind::simplex: return "simplex";
    case ProxKind::hyperbox: return "hyperbox";
    case ProxKind::affine: return "affine";
    case ProxKind::tv1d: return "tv1d";
    case ProxKind::power: return "power";
  }
  return "unknown";
}

ProxKind prox_kind_from_string(const std::string& name) {
  for (auto k : {ProxKind::zero, ProxKind::l1, ProxKind::l2norm, ProxKind::group, ProxKind::ball2, ProxKind::ball1,
                 ProxKind::simplex, ProxKind::hyperbox, ProxKind::affine, ProxKind::tv1d, ProxKind::power})
    if (to_string(k) == name) return k;
  throw ArgumentError("unknown prox kind '" + name +
                      "' (expected zero, l1, l2norm, group, ball2, ball1, simplex, hyperbox, affine, tv1d, power)");
}

ProxOracle ProxOracle::zero() { return ProxOracle{}; }

ProxOracle ProxOracle::l1(double lambda) {
  ProxOracle p;
  p.kind = ProxKind::l1;
  p.lambda = lambda;
  return p;
}

ProxOracle ProxOracle::l2norm(double lambda) {
  ProxOracle p;
  p.kind = ProxKind::l2norm;
  p.lambda = lambda;
  return p;
}

ProxOracle ProxOracle::group(double lambda, Groups groups) {
  ProxOracle p;
  p.kind = ProxKind::group;
  p.lambda = lambda;
  p.groups = std::move(groups);
  return p;
}

ProxOracle ProxOracle::ball2(double r, VectorXd c) {
  if (!(r > 0.0)) throw ArgumentError("ball radius must be positive");
  ProxOracle p;
  p.kind = ProxKind::ball2;
  p.radius = r;
  p.center = std::move(c);
  return p;
}

ProxOracle ProxOracle::ball1(double r, VectorXd c) {
  if (!(r > 0.0)) throw ArgumentError("ball radius must be positive");
  ProxOracle p;
  p.kind = ProxKind::ball1;
  p.radius = r;
  p.center = std::move(c);
  return p;
}

ProxOracle ProxOracle::simplex(double s) {
  ProxOracle p;
  p.kind = ProxKind::simplex;
  p.radius = s;
  return p;
}

ProxOracle ProxOracle::hyperbox(VectorXd a, double b, VectorXd l, VectorXd u) {
  ProxOracle p;
  p.kind = ProxKind::hyperbox;
  p.a = std::move(a);
  p.beta = b;
  p.lower = std::move(l);
  p.upper = std::move(u);
  return p;
}

ProxOracle ProxOracle::affine_set(MatrixXd A, VectorXd b) {
  ProxOracle p;
  p.kind = ProxKind::affine;
  p.affine = std::make_shared<const AffineProjector>(std::move(A), std::move(b));
  return p;
}

ProxOracle ProxOracle::tv1d(double lambda) {
  ProxOracle p;
  p.kind = ProxKind::tv1d;
  p.lambda = lambda;
  return p;
}

ProxOracle ProxOracle::power_norm(double r, double lambda) {
  ProxOracle p;
  p.kind = ProxKind::power;
  p.power = r;
  p.lambda = lambda;
  return p;
}

bool ProxOracle::is_indicator() const {
  switch (kind) {
    case ProxKind::ball2:
    case ProxKind::ball1:
    case ProxKind::simplex:
    case ProxKind::hyperbox:
    case ProxKind::affine: return true;
    default: return false;
  }
}

VectorXd ProxOracle::evaluate(double gamma, const VectorXd& x) const {
  if (!(gamma > 0.0)) throw ArgumentError("prox step gamma must be positive");
  switch (kind) {
    case ProxKind::zero: return x;
    case ProxKind::l1: return prox_l1(gamma * lambda, x);
    case ProxKind::l2norm: return prox_euclidean_norm(gamma * lambda, x);
    case ProxKind::group: return prox_group_norm(gamma * lambda, x, groups);
    case ProxKind::ball2: return project_l2_ball(radius, center, x);
    case ProxKind::ball1: return project_l1_ball(radius, center, x);
    case ProxKind::simplex: return project_simplex(x, radius);
    case ProxKind::hyperbox: return project_hyperplane_box(a, beta, lower, upper, x);
    case ProxKind::affine: return affine->project(x);
    case ProxKind::tv1d: return prox_tv_1d(gamma * lambda, x);
    case ProxKind::power: return prox_power_norm(gamma, power, x, lambda);
  }
  throw ArgumentError("unhandled prox kind");
}

double ProxOracle::value(const VectorXd& x) const {
  switch (kind) {
    case ProxKind::zero: return 0.0;
    case ProxKind::l1: return lambda * x.lpNorm<1>();
    case ProxKind::l2norm: return lambda * x.norm();
    case ProxKind::group: {
      double total = 0.0;
      for (const auto& g : groups) {
        double sq = 0.0;
        for (int j : g) sq += x[j] * x[j];
        total += std::sqrt(sq);
      }
      return lambda * total;
    }
    case ProxKind::ball2: {
      const double d = center.size() ? (x - center).norm() : x.norm();
      return d <= radius * (1.0 + kFeasTol) + kFeasTol ? 0.0 : kInf;
    }
    case ProxKind::ball1: {
      const double d = center.size() ? (x - center).lpNorm<1>() : x.lpNorm<1>();
      return d <= radius * (1.0 + kFeasTol) + kFeasTol ? 0.0 : kInf;
    }
    case ProxKind::simplex:
      return x.minCoeff() >= -kFeasTol && std::abs(x.sum() - radius) <= kFeasTol * (1.0 + radius) ? 0.0 : kInf;
    case ProxKind::hyperbox: {
      if (std::abs(a.dot(x) - beta) > kFeasTol * (1.0 + std::abs(beta) + a.norm() * x.norm())) return kInf;
      if (((x - lower).array() < -kFeasTol).any() || ((upper - x).array() < -kFeasTol).any()) return kInf;
      return 0.0;
    }
    case ProxKind::affine:
      return affine->residual(x) <= kFeasTol * (1.0 + affine->b().norm() + x.norm()) ? 0.0 : kInf;
    case ProxKind::tv1d: {
      double total = 0.0;
      for (Eigen::Index i = 0; i + 1 < x.size(); ++i) total += std::abs(x[i + 1] - x[i]);
      return lambda * total;
    }
    case ProxKind::power: return lambda * std::pow(x.norm(), power + 2.0);
  }
  return kInf;
}

double moreau_value(const ProxOracle& psi, double gamma, const VectorXd& x, VectorXd* z_out) {
  VectorXd z = psi.evaluate(gamma, x);
  const double pz = psi.is_indicator() ? 0.0 : psi.value(z);
  const double v = pz + (z - x).squaredNorm() / (2.0 * gamma);
  if (z_out) *z_out = std::move(z);
  return v;
}

}  // namespace smoothcd
