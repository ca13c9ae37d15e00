#include "smoothcd/harness.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <numbers>

#include "smoothcd/errors.hpp"

namespace smoothcd {

namespace {

QuadraticComposite composite_from(const Matrix& B, const VectorXd& c, ProxOracle psi) {
  Matrix A;
  if (const SparseMatrix* Bs = B.as_sparse()) {
    SparseMatrix BtB = Bs->transpose() * (*Bs);
    A = Matrix(SparseMatrix(0.5 * (BtB + SparseMatrix(BtB.transpose()))));
  } else {
    const MatrixXd BtB = B.dense().transpose() * B.dense();
    A = Matrix(MatrixXd(0.5 * (BtB + BtB.transpose())));
  }
  VectorXd b = -B.multiply_transpose(c);
  return QuadraticComposite(std::move(A), std::move(b), std::move(psi));
}

}  // namespace

GeneratedProblem gen_quadratic_l2(int n, int m, double lambda, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ArgumentError("gen_quadratic_l2 needs n, m >= 1");
  if (lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
  Pcg32 rng(splitmix64(seed), 11);
  std::vector<Eigen::Triplet<double>> entries;
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < m; ++r)
      if (rng.uniform() < 0.1) entries.emplace_back(r, j, rng.normal());
  SparseMatrix B(m, n);
  B.setFromTriplets(entries.begin(), entries.end());
  VectorXd c(m), x0(n);
  for (int r = 0; r < m; ++r) c[r] = rng.normal();
  for (int j = 0; j < n; ++j) x0[j] = rng.normal();
  GeneratedProblem g;
  g.family = "quadratic_l2";
  g.composite = composite_from(Matrix(B), c, lambda > 0.0 ? ProxOracle::l2norm(lambda) : ProxOracle::zero());
  if (lambda > 0.0) g.saddle = saddle_view(g.composite);
  g.x0 = x0;
  g.offset = 0.5 * c.squaredNorm();
  return g;
}

GeneratedProblem gen_quadratic_l1(int n, int m, double lambda, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ArgumentError("gen_quadratic_l1 needs n, m >= 1");
  if (lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
  Pcg32 rng(splitmix64(seed), 17);
  MatrixXd B(m, n);
  const double scale = 1.0 / std::sqrt(double(m));
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < m; ++r) B(r, j) = scale * rng.normal();
  VectorXd c(m), x0(n);
  for (int r = 0; r < m; ++r) c[r] = rng.normal();
  for (int j = 0; j < n; ++j) x0[j] = rng.normal();
  GeneratedProblem g;
  g.family = "quadratic_l1";
  g.composite = composite_from(Matrix(B), c, ProxOracle::l1(lambda));
  g.saddle = saddle_view(g.composite);
  g.x0 = x0;
  g.offset = 0.5 * c.squaredNorm();
  return g;
}

GeneratedProblem gen_identity_l1(int n, double lambda, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("gen_identity_l1 needs n >= 1");
  if (lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
  Pcg32 rng(splitmix64(seed), 19);
  VectorXd c(n), x0(n);
  for (int j = 0; j < n; ++j) c[j] = rng.normal();
  for (int j = 0; j < n; ++j) x0[j] = rng.normal();
  GeneratedProblem g;
  g.family = "identity_l1";
  g.composite = QuadraticComposite(Matrix::identity(n), -c, ProxOracle::l1(lambda));
  g.saddle = saddle_view(g.composite);
  g.x0 = x0;
  g.offset = 0.5 * c.squaredNorm();
  return g;
}

MatrixXd random_givens_orthogonal(int n, int rotations, Pcg32& rng) {
  MatrixXd Q = MatrixXd::Identity(n, n);
  if (n < 2) return Q;
  for (int k = 0; k < rotations; ++k) {
    const int i = static_cast<int>(rng.below(n));
    int j = static_cast<int>(rng.below(n - 1));
    if (j >= i) ++j;
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double cs = std::cos(theta), sn = std::sin(theta);
    // left-multiply by the rotation acting on rows i and j
    for (int col = 0; col < n; ++col) {
      const double a = Q(i, col), b = Q(j, col);
      Q(i, col) = cs * a - sn * b;
      Q(j, col) = sn * a + cs * b;
    }
  }
  return Q;
}

GeneratedProblem gen_quadratic_tv(int n, double lambda, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("gen_quadratic_tv needs n >= 2");
  if (lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
  Pcg32 rng(splitmix64(seed), 13);
  const MatrixXd Q = random_givens_orthogonal(n, 5 * n, rng);
  VectorXd C = VectorXd::Zero(n);
  C[0] = 100.0;
  for (int j = 1; j < n / 2; ++j) C[j] = rng.uniform();
  MatrixXd B = Q.transpose() * C.asDiagonal() * Q;
  VectorXd c(n), x0(n);
  for (int r = 0; r < n; ++r) c[r] = rng.normal();
  for (int j = 0; j < n; ++j) x0[j] = rng.normal();
  GeneratedProblem g;
  g.family = "quadratic_tv";
  // A = Q'C^2Q directly keeps it exactly symmetric
  MatrixXd A = Q.transpose() * C.array().square().matrix().asDiagonal() * Q;
  A = 0.5 * (A + A.transpose()).eval();
  VectorXd b = -B.transpose() * c;
  g.composite = QuadraticComposite(Matrix(std::move(A)), std::move(b),
                                   lambda > 0.0 ? ProxOracle::tv1d(lambda) : ProxOracle::zero());
  if (lambda > 0.0) g.saddle = saddle_view(g.composite);
  g.x0 = x0;
  g.offset = 0.5 * c.squaredNorm();
  return g;
}

ReferenceSolution reference_solve(const QuadraticComposite& p, double tol, long max_iterations) {
  ReferenceSolution out;
  const int n = p.n();
  const bool separable = p.psi.kind == ProxKind::zero || p.psi.kind == ProxKind::l1;
  if (separable && p.A.is_diagonal()) {
    const VectorXd a = p.A.diagonal();
    if (a.minCoeff() > 0.0) {
      const double lam = p.psi.kind == ProxKind::l1 ? p.psi.lambda : 0.0;
      out.x.resize(n);
      for (int j = 0; j < n; ++j) {
        const double v = -p.b[j];
        out.x[j] = std::copysign(std::max(std::abs(v) - lam, 0.0), v) / a[j];
      }
      out.f = p.value(out.x);
      out.exact = out.converged = true;
      return out;
    }
  }
  const double L = std::max(p.lipschitz_L, 1e-300);
  const double t = 1.0 / L;
  VectorXd x = VectorXd::Zero(n), y = x, x_prev = x;
  double theta = 1.0;
  double f_prev = p.value(x);
  long k = 0;
  for (; k < max_iterations; ++k) {
    const VectorXd x_new = p.psi.evaluate(t, y - t * p.smooth_grad(y));
    const double f_new = p.value(x_new);
    if (f_new > f_prev && theta > 1.0) {
      // restart momentum from the last iterate; a plain step (theta = 1) is always taken,
      // otherwise rounding noise near the optimum would stall the loop
      theta = 1.0;
      y = x;
      continue;
    }
    const double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = x_new + ((theta - 1.0) / theta_new) * (x_new - x);
    x_prev = x;
    x = x_new;
    theta = theta_new;
    f_prev = f_new;
    if ((k + 1) % 20 == 0) {
      const VectorXd G = (x - p.psi.evaluate(t, x - t * p.smooth_grad(x))) / t;
      out.residual = G.norm();
      if (out.residual <= tol) {
        out.converged = true;
        ++k;
        break;
      }
    }
  }
  // finish with plain proximal gradient steps, which never increase F
  for (int it = 0; it < 50; ++it) {
    const VectorXd x_new = p.psi.evaluate(t, x - t * p.smooth_grad(x));
    if (p.value(x_new) <= p.value(x)) x = x_new;
  }
  out.residual = ((x - p.psi.evaluate(t, x - t * p.smooth_grad(x))) / t).norm();
  out.converged = out.converged || out.residual <= tol;
  out.x = x;
  out.f = p.value(x);
  out.iterations = k;
  return out;
}

const std::vector<std::string>& smoothing_names() {
  static const std::vector<std::string> names{"moreau", "fb", "dr", "ns"};
  return names;
}

void check_smoothing_name(const std::string& name) {
  for (const auto& s : smoothing_names())
    if (s == name) return;
  throw ArgumentError("unknown smoothing '" + name + "' (valid: moreau, fb, dr, ns)");
}

double default_gamma(const std::string& smoothing, const QuadraticComposite& p, double eps) {
  check_smoothing_name(smoothing);
  if (smoothing == "moreau") return 1.0;
  // any gamma is admissible when A = 0
  if (smoothing == "fb" || smoothing == "dr") return p.lipschitz_L > 0.0 ? 0.5 / p.lipschitz_L : 1.0;
  if (!(eps > 0.0)) throw ArgumentError("target accuracy eps must be positive");
  return eps / (2.0 * saddle_view(p).d_bar());
}

SurrogatePtr make_surrogate(const std::string& smoothing, const QuadraticComposite& p, double gamma) {
  check_smoothing_name(smoothing);
  if (smoothing == "moreau") return std::make_shared<MoreauSurrogate>(p, gamma);
  if (smoothing == "fb") return std::make_shared<ForwardBackwardSurrogate>(p, gamma);
  if (smoothing == "dr") return std::make_shared<DouglasRachfordSurrogate>(p, gamma);
  return std::make_shared<NesterovSurrogate>(saddle_view(p), gamma);
}

}  // namespace smoothcd
