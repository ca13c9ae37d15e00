#include "smoothcd/brute_force.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "smoothcd/errors.hpp"

namespace smoothcd {

double golden_section_min(const std::function<double(double)>& f, double lo, double hi, double* fmin) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  const double floor_width = 4e-16 * (1.0 + std::abs(lo) + std::abs(hi));
  while (b - a > floor_width) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      if (!(c < d)) break;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      if (!(c < d)) break;
      fd = f(d);
    }
  }
  const double xm = fc <= fd ? c : d;
  if (fmin) *fmin = std::min(fc, fd);
  return xm;
}

VectorXd brute_force_prox(const ScalarFn& psi, double gamma, const VectorXd& x, double radius, const VectorXd& centre) {
  const auto n = x.size();
  if (n < 1 || n > 3) throw ArgumentError("brute_force_prox supports 1 <= n <= 3 only");
  if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
  if (radius <= 0.0) radius = 4.0 * (x.lpNorm<Eigen::Infinity>() + 1.0);
  const VectorXd mid = centre.size() == n ? centre : x;
  VectorXd u = mid;
  auto objective = [&](const VectorXd& v) { return psi(v) + (v - x).squaredNorm() / (2.0 * gamma); };

  // value of the best completion of coordinates >= k, given u[0..k)
  std::function<double(int)> inner = [&](int k) -> double {
    if (k == n) return objective(u);
    double best = 0.0;
    auto line = [&](double t) {
      u[k] = t;
      return inner(k + 1);
    };
    const double t = golden_section_min(line, mid[k] - radius, mid[k] + radius, &best);
    u[k] = t;
    // re-run deeper levels so u holds the argmin for this t
    return k + 1 < n ? inner(k + 1) : objective(u);
  };
  inner(0);
  return u;
}

namespace {

// {v : C v = d} as v0 + N t with N orthonormal and v0 the point of the set closest to x.
struct AffineChart {
  VectorXd v0;
  Eigen::MatrixXd N;
};

AffineChart chart(const Eigen::MatrixXd& C, const VectorXd& d, const VectorXd& x) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > 1e-12 * sv[0]) ++rank;
  AffineChart c;
  c.v0 = x - svd.solve(C * x - d);
  c.N = svd.matrixV().rightCols(C.cols() - rank);
  return c;
}

}  // namespace

VectorXd brute_force_prox(const ProxOracle& psi, double gamma, const VectorXd& x) {
  const auto n = x.size();
  if (n < 1 || n > 3) throw ArgumentError("brute_force_prox supports 1 <= n <= 3 only");
  if (!psi.is_indicator()) return brute_force_prox([&](const VectorXd& v) { return psi.value(v); }, gamma, x);

  double scale = x.lpNorm<Eigen::Infinity>() + psi.radius + 1.0;
  if (psi.center.size()) scale += psi.center.lpNorm<Eigen::Infinity>();
  if (psi.kind == ProxKind::hyperbox)
    scale += psi.lower.lpNorm<Eigen::Infinity>() + psi.upper.lpNorm<Eigen::Infinity>() + std::abs(psi.beta);
  // exact penalty: larger than any multiplier (|x - p| / gamma)
  const double M = 10.0 * (1.0 + 2.0 * scale / gamma);

  // inequality part of the set as a penalty, equality part through a chart
  std::function<double(const VectorXd&)> pen;
  Eigen::MatrixXd C;
  VectorXd d;
  switch (psi.kind) {
    case ProxKind::ball2:
      pen = [&](const VectorXd& v) {
        const double r = psi.center.size() ? (v - psi.center).norm() : v.norm();
        return M * std::max(0.0, r - psi.radius);
      };
      break;
    case ProxKind::ball1:
      pen = [&](const VectorXd& v) {
        const double r = psi.center.size() ? (v - psi.center).lpNorm<1>() : v.lpNorm<1>();
        return M * std::max(0.0, r - psi.radius);
      };
      break;
    case ProxKind::simplex:
      C = Eigen::MatrixXd::Ones(1, n);
      d = VectorXd::Constant(1, psi.radius);
      pen = [&](const VectorXd& v) { return M * (-v.array()).max(0.0).sum(); };
      break;
    case ProxKind::hyperbox:
      C = psi.a.transpose();
      d = VectorXd::Constant(1, psi.beta);
      pen = [&](const VectorXd& v) {
        return M * ((psi.lower - v).array().max(0.0).sum() + (v - psi.upper).array().max(0.0).sum());
      };
      break;
    case ProxKind::affine:
      C = psi.affine->A();
      d = psi.affine->b();
      pen = [](const VectorXd&) { return 0.0; };
      break;
    default: throw ArgumentError("brute_force_prox: unsupported indicator");
  }
  if (C.size() == 0) return brute_force_prox(pen, gamma, x, 4.0 * scale);
  const AffineChart ch = chart(C, d, x);
  if (ch.N.cols() == 0) return ch.v0;
  // |v0 + N t - x|^2 = |v0 - x|^2 + |t|^2 because v0 - x is orthogonal to range(N)
  auto pen_t = [&](const VectorXd& t) { return pen(ch.v0 + ch.N * t); };
  const VectorXd t = brute_force_prox(pen_t, gamma, VectorXd::Zero(ch.N.cols()), 4.0 * (scale + ch.v0.lpNorm<Eigen::Infinity>()));
  return ch.v0 + ch.N * t;
}

}  // namespace smoothcd
