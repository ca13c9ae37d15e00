#include "smoothcd/bregman.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "smoothcd/errors.hpp"
#include "smoothcd/lipschitz.hpp"
#include "smoothcd/matrix.hpp"
#include "smoothcd/rng.hpp"

namespace smoothcd {

namespace {

void check_block(const BlockPartition& part, int i, const VectorXd& v, const char* what) {
  if (i < 0 || i >= part.count()) throw ArgumentError(std::string("block index out of range in ") + what);
  if (v.size() != part.size(i)) throw ArgumentError(std::string("block vector has the wrong size in ") + what);
}

// ||x||^2 without block i
double rest_sq_norm(const BlockPartition& part, const VectorXd& x, int i) {
  const double xi = part.gather(x, i).squaredNorm();
  return std::max(0.0, x.squaredNorm() - xi);
}

// Bisection on an increasing function h over [lo, hi] with h(lo) <= 0 <= h(hi).
template <class H>
double bisect_increasing(H&& h, double lo, double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PowerKernel::PowerKernel(double p, BlockPartition partition) : Kernel(std::move(partition)), p_(p) {
  if (!(p > 2.0)) throw ArgumentError("power kernel needs p > 2");
}

double PowerKernel::value(const VectorXd& x) const {
  const double s = x.squaredNorm();
  return std::pow(s, 0.5 * p_) / p_ + 0.5 * s;
}

VectorXd PowerKernel::grad(const VectorXd& x) const {
  const double s = x.squaredNorm();
  return (std::pow(s, 0.5 * (p_ - 2.0)) + 1.0) * x;
}

double PowerKernel::coord_bregman(const VectorXd& x, int i, const VectorXd& d) const {
  check_block(partition_, i, d, "coord_bregman");
  const VectorXd xi = partition_.gather(x, i);
  const double s0 = x.squaredNorm();
  const double dd = d.squaredNorm();
  const double t = xi.dot(d);
  const double delta = 2.0 * t + dd;
  if (p_ == 4.0) return 0.5 * (s0 + 1.0) * dd + 0.25 * delta * delta;
  const double s1 = std::max(0.0, s0 + delta);
  const double power = (std::pow(s1, 0.5 * p_) - std::pow(s0, 0.5 * p_)) / p_ - std::pow(s0, 0.5 * (p_ - 2.0)) * t;
  return std::max(0.0, power) + 0.5 * dd;
}

VectorXd PowerKernel::solve_subproblem(const VectorXd& x, int i, const VectorXd& g, double L) const {
  return solve_subproblem_power(*this, x, i, g, L);
}

QuadKernel::QuadKernel(MatrixXd A, BlockPartition partition) : Kernel(std::move(partition)), A_(std::move(A)) {
  if (A_.rows() != A_.cols() || A_.rows() != partition_.n()) throw ArgumentError("quadratic kernel matrix must be n x n");
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A_.cwiseAbs().maxCoeff()))
    throw ArgumentError("quadratic kernel matrix must be symmetric");
  for (int i = 0; i < partition_.count(); ++i) {
    const int o = partition_.offset(i), m = partition_.size(i);
    Eigen::LLT<MatrixXd> llt(A_.block(o, o, m, m));
    if (llt.info() != Eigen::Success) throw ArgumentError("quadratic kernel diagonal blocks must be positive definite");
  }
}

QuadKernel::QuadKernel(MatrixXd A) : QuadKernel(A, BlockPartition::scalar(static_cast<int>(A.rows()))) {}

double QuadKernel::value(const VectorXd& x) const { return 0.5 * x.dot(A_ * x); }

VectorXd QuadKernel::grad(const VectorXd& x) const { return A_ * x; }

double QuadKernel::coord_bregman(const VectorXd& x, int i, const VectorXd& d) const {
  (void)x;
  check_block(partition_, i, d, "coord_bregman");
  const int o = partition_.offset(i), m = partition_.size(i);
  return 0.5 * d.dot(A_.block(o, o, m, m) * d);
}

VectorXd QuadKernel::solve_subproblem(const VectorXd& x, int i, const VectorXd& g, double L) const {
  return solve_subproblem_quadratic(*this, x, i, g, L);
}

double bregman_distance(const Kernel& kernel, const VectorXd& y, const VectorXd& x) {
  if (y.size() != x.size()) throw ArgumentError("bregman_distance: size mismatch");
  return std::max(0.0, kernel.value(y) - kernel.value(x) - kernel.grad(x).dot(y - x));
}

double sextic_value(double a, double b, double c, double alpha) {
  const double s = alpha * alpha;
  return ((a * s + (2.0 * a - b)) * s + (a - 2.0 * b)) * s - c;
}

double sextic_root(double a, double b, double c) {
  if (!(a > 0.0) || b < 0.0 || c < 0.0) throw ArgumentError("sextic_root needs a > 0, b >= 0, c >= 0");
  if (c == 0.0) return 0.0;
  // Work in s = alpha^2: P(s) = a s^3 + (2a - b) s^2 + (a - 2b) s - c, one sign change so one positive root.
  auto P = [&](double s) { return ((a * s + (2.0 * a - b)) * s + (a - 2.0 * b)) * s - c; };
  auto dP = [&](double s) { return (3.0 * a * s + 2.0 * (2.0 * a - b)) * s + (a - 2.0 * b); };
  double lo = 0.0, hi = 1.0;
  while (P(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalFailure("sextic_root: failed to bracket the root");
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double v = P(s);
    if (v == 0.0) return std::sqrt(s);
    if (v < 0.0)
      lo = s;
    else
      hi = s;
    const double slope = dP(s);
    double next = slope > 0.0 ? s - v / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 2.0 * std::numeric_limits<double>::epsilon() * s || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      s = next;
      break;
    }
    s = next;
  }
  return std::sqrt(s);
}

VectorXd solve_subproblem_power(const PowerKernel& kernel, const VectorXd& x, int i, const VectorXd& g, double L) {
  const BlockPartition& part = kernel.partition();
  check_block(part, i, g, "solve_subproblem_power");
  if (!(L > 0.0)) throw ArgumentError("solve_subproblem_power needs L > 0");
  const double p = kernel.p();
  const VectorXd xi = part.gather(x, i);
  const double rho = rest_sq_norm(part, x, i);
  const double e = 0.5 * (p - 2.0);
  // The block of x + U_i d is z = w / (L (1 + s^e)) where s = ||x + U_i d||^2 solves
  // L^2 (1 + s^e)^2 (s - rho) = ||w||^2.
  const VectorXd w = L * (std::pow(x.squaredNorm(), e) + 1.0) * xi - g;
  const double ww = w.squaredNorm();
  double s;
  if (ww == 0.0) {
    s = rho;
  } else if (p == 4.0) {
    const double a = L * L, b = a * rho;
    const double alpha = sextic_root(a, b, ww + b);
    s = alpha * alpha;
  } else {
    auto h = [&](double t) {
      const double f = 1.0 + std::pow(t, e);
      return L * L * f * f * (t - rho) - ww;
    };
    s = bisect_increasing(h, rho, rho + ww / (L * L));
  }
  const VectorXd z = w / (L * (1.0 + std::pow(s, e)));
  VectorXd d = z - xi;
  const double res = stationarity_residual(kernel, x, i, g, L, d);
  if (!(res <= 1e-8 * (1.0 + g.norm()))) {
    std::ostringstream msg;
    msg << "power subproblem stationarity residual " << res << " at block " << i << " (L = " << L << ", s = " << s
        << ")";
    throw NumericalFailure(msg.str());
  }
  return d;
}

VectorXd solve_subproblem_quadratic(const QuadKernel& kernel, const VectorXd& x, int i, const VectorXd& g, double L) {
  (void)x;
  const BlockPartition& part = kernel.partition();
  check_block(part, i, g, "solve_subproblem_quadratic");
  if (!(L > 0.0)) throw ArgumentError("solve_subproblem_quadratic needs L > 0");
  const int o = part.offset(i), m = part.size(i);
  if (m == 1) return VectorXd::Constant(1, -g[0] / (L * kernel.A()(o, o)));
  Eigen::LLT<MatrixXd> llt(kernel.A().block(o, o, m, m));
  return -llt.solve(g) / L;
}

double stationarity_residual(const Kernel& kernel, const VectorXd& x, int i, const VectorXd& g, double L,
                             const VectorXd& d) {
  VectorXd y = x;
  const BlockPartition& part = kernel.partition();
  y.segment(part.offset(i), part.size(i)) += d;
  return (g + L * (kernel.coord_grad(y, i) - kernel.coord_grad(x, i))).norm();
}

VectorXd quartic_lipschitz(const MatrixXd& E, const MatrixXd& A, const VectorXd& b, const VectorXd& L_f,
                           const BlockPartition& partition, double a_coef) {
  const int N = partition.count();
  if (L_f.size() != N) throw ArgumentError("quartic_lipschitz: L_f must have one entry per block");
  if ((E.size() && E.cols() != partition.n()) || (A.size() && A.cols() != partition.n()) || A.rows() != b.size())
    throw ArgumentError("quartic_lipschitz: dimension mismatch");
  const double nA = A.size() ? spectral_norm(A) : 0.0;
  const double nE = E.size() ? spectral_norm(E) : 0.0;
  const double rA = (b.norm() + nA) * (b.norm() + nA);
  VectorXd L(N);
  for (int i = 0; i < N; ++i) {
    const int o = partition.offset(i), m = partition.size(i);
    const double ai = A.size() ? spectral_norm(A.middleCols(o, m)) : 0.0;
    const double ei = E.size() ? spectral_norm(E.middleCols(o, m)) : 0.0;
    L[i] = L_f[i] + a_coef * ai * ai * rA + 3.0 * ei * ei * nE * nE;
  }
  return L;
}

QuarticProblem::QuarticProblem(MatrixXd E, MatrixXd A, VectorXd b, MatrixXd Af, VectorXd bf, BlockPartition partition)
    : E_(std::move(E)), A_(std::move(A)), Af_(std::move(Af)), b_(std::move(b)), bf_(std::move(bf)),
      partition_(std::move(partition)) {
  const int n = partition_.n();
  if (E_.size() == 0) E_ = MatrixXd::Zero(0, n);
  if (A_.size() == 0) A_ = MatrixXd::Zero(0, n);
  if (b_.size() == 0) b_ = VectorXd::Zero(A_.rows());
  if (Af_.size() == 0) Af_ = MatrixXd::Zero(n, n);
  if (bf_.size() == 0) bf_ = VectorXd::Zero(n);
  if (E_.cols() != n || A_.cols() != n || b_.size() != A_.rows() || Af_.rows() != n || Af_.cols() != n ||
      bf_.size() != n)
    throw ArgumentError("quartic problem: dimension mismatch");
  if ((Af_ - Af_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Af_.cwiseAbs().maxCoeff()))
    throw ArgumentError("quartic problem: quadratic part must be symmetric");
  Lf_.resize(partition_.count());
  for (int i = 0; i < partition_.count(); ++i) {
    const int o = partition_.offset(i), m = partition_.size(i);
    Lf_[i] = m == 1 ? std::abs(Af_(o, o)) : symmetric_norm(Af_.block(o, o, m, m));
  }
  L_ = quartic_lipschitz(E_, A_, b_, Lf_, partition_);
}

QuarticProblem::QuarticProblem(MatrixXd E, MatrixXd A, VectorXd b, MatrixXd Af, VectorXd bf)
    : QuarticProblem(E, A, b, Af, bf, BlockPartition::scalar(static_cast<int>(std::max(E.cols(), std::max(A.cols(), Af.cols()))))) {}

double QuarticProblem::value(const VectorXd& x) const { return value(make_state(x)); }

VectorXd QuarticProblem::grad(const VectorXd& x) const {
  const VectorXd Ex = E_ * x;
  const VectorXd r = A_ * x - b_;
  return Af_ * x + bf_ + Ex.squaredNorm() * (E_.transpose() * Ex) + 2.0 * (A_.transpose() * r.array().cube().matrix());
}

VectorXd QuarticProblem::coord_grad(int i, const VectorXd& x) const { return coord_grad(i, make_state(x)); }

QuarticProblem::State QuarticProblem::make_state(const VectorXd& x) const {
  if (x.size() != n()) throw ArgumentError("quartic problem: point has the wrong size");
  return {x, E_ * x, A_ * x - b_, Af_ * x};
}

double QuarticProblem::value(const State& st) const {
  const double e2 = st.Ex.squaredNorm();
  return 0.5 * st.x.dot(st.Afx) + bf_.dot(st.x) + 0.25 * e2 * e2 + 0.5 * st.r.array().square().square().sum();
}

VectorXd QuarticProblem::coord_grad(int i, const State& st) const {
  const int o = partition_.offset(i), m = partition_.size(i);
  return st.Afx.segment(o, m) + bf_.segment(o, m) + st.Ex.squaredNorm() * (E_.middleCols(o, m).transpose() * st.Ex) +
         2.0 * (A_.middleCols(o, m).transpose() * st.r.array().cube().matrix());
}

void QuarticProblem::apply_step(State& st, int i, const VectorXd& d) const {
  const int o = partition_.offset(i), m = partition_.size(i);
  st.x.segment(o, m) += d;
  st.Ex.noalias() += E_.middleCols(o, m) * d;
  st.r.noalias() += A_.middleCols(o, m) * d;
  st.Afx.noalias() += Af_.middleCols(o, m) * d;
}

QuarticProblem gen_quartic(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ArgumentError("gen_quartic needs n, m >= 1");
  Pcg32 rng(splitmix64(seed), 7);
  const double scale = 1.0 / std::sqrt(double(m));
  MatrixXd E(m, n), A(m, n), G(m, n);
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < m; ++r) E(r, j) = scale * rng.normal();
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < m; ++r) A(r, j) = scale * rng.normal();
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < m; ++r) G(r, j) = scale * rng.normal();
  VectorXd b(m), bf(n);
  for (int r = 0; r < m; ++r) b[r] = rng.normal();
  for (int j = 0; j < n; ++j) bf[j] = rng.normal();
  MatrixXd Af = G.transpose() * G;
  Af = 0.5 * (Af + Af.transpose()).eval();
  return QuarticProblem(E, A, b, Af, bf);
}

RrcdResult rrcd_run(const QuarticProblem& problem, const Kernel& kernel, const VectorXd& x0, const SolverConfig& cfg,
                    const RrcdOptions& opt, const VectorXd& L_override) {
  cfg.validate();
  if (kernel.partition().sizes() != problem.partition().sizes())
    throw ArgumentError("rrcd_run: kernel and problem use different block partitions");
  const VectorXd L = L_override.size() ? L_override : problem.lipschitz();
  if (L.size() != problem.blocks()) throw ArgumentError("rrcd_run: one relative constant per block is required");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  RrcdResult out;
  const int N = problem.blocks();
  const Sampler sampler(L, cfg.alpha);
  Pcg32 rng(splitmix64(cfg.seed), 0x2545f491u);
  QuarticProblem::State st = problem.make_state(x0);
  long budget = long(cfg.max_epochs) * N;
  if (cfg.max_iterations) budget = std::min(budget, *cfg.max_iterations);
  const long check = long(cfg.trace_every) * N;

  auto record = [&](long k) {
    TraceRecord r;
    r.k = k;
    r.epoch = double(k) / N;
    r.f_gamma = problem.value(st.x);
    r.f_orig_at_B = r.f_gamma;
    r.grad_norm = problem.grad(st.x).norm();
    if (!std::isfinite(r.grad_norm) || !std::isfinite(r.f_gamma))
      throw NumericalFailure("non-finite objective or gradient at iteration " + std::to_string(k));
    r.time_s = elapsed();
    out.trace.push_back(r);
    return r.grad_norm <= cfg.grad_tol;
  };

  long k = 0;
  out.converged = record(0);
  while (!out.converged && k < budget) {
    const int i = sampler.draw(rng);
    const VectorXd g = problem.coord_grad(i, st);
    VectorXd d;
    try {
      d = kernel.solve_subproblem(st.x, i, g, L[i]);
    } catch (const NumericalFailure& e) {
      std::ostringstream msg;
      msg << e.what() << " at iteration " << k + 1 << ", |x| = " << st.x.norm();
      throw NumericalFailure(msg.str());
    }
    const double res = stationarity_residual(kernel, st.x, i, g, L[i], d) / (1.0 + g.norm());
    out.max_stationarity = std::max(out.max_stationarity, res);
    if (res > opt.stationarity_tol)
      throw NumericalFailure("subproblem stationarity residual " + std::to_string(res) + " at iteration " +
                             std::to_string(k + 1));
    if (opt.check_descent) {
      const VectorXd x_old = st.x;
      const double f_old = problem.value(x_old);
      VectorXd x_new = x_old;
      x_new.segment(problem.partition().offset(i), problem.partition().size(i)) += d;
      const double f_new = problem.value(x_new);
      const double gain = L[i] * kernel.coord_bregman(x_new, i, -d);
      out.max_descent_violation = std::max(out.max_descent_violation, (f_new - f_old + gain) / (1.0 + std::abs(f_old)));
    }
    problem.apply_step(st, i, d);
    ++k;
    if (k % check == 0 || k == budget) out.converged = record(k);
  }
  out.x = st.x;
  out.iterations = k;
  out.epochs = double(k) / N;
  out.time_s = elapsed();
  return out;
}

}  // namespace smoothcd
