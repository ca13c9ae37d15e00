#include "smoothcd/surrogate_check.hpp"

#include <cmath>
#include <sstream>

#include "smoothcd/rng.hpp"

namespace smoothcd {

namespace {

VectorXd gaussian(Pcg32& rng, Eigen::Index n) {
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

bool CheckReport::passed(double sandwich_tol, double gradient_tol, double lipschitz_tol) const {
  return sandwich <= sandwich_tol && gradient <= gradient_tol && lipschitz <= lipschitz_tol &&
         cocoercivity <= lipschitz_tol && convexity <= sandwich_tol && cache <= 1e-9;
}

std::string CheckReport::summary() const {
  std::ostringstream os;
  os.precision(3);
  os << "sandwich=" << sandwich << " gradient=" << gradient << " lipschitz=" << lipschitz
     << " cocoercivity=" << cocoercivity << " convexity=" << convexity << " cache=" << cache;
  return os.str();
}

VectorXd finite_diff_grad(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double h) {
  VectorXd g(x.size());
  VectorXd y = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    y[j] = x[j] + h;
    const double fp = f(y);
    y[j] = x[j] - h;
    const double fm = f(y);
    y[j] = x[j];
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

CheckReport surrogate_check(const SmoothSurrogate& s, const std::function<double(const VectorXd&)>& F,
                            const CheckOptions& opt) {
  CheckReport rep;
  Pcg32 rng(opt.seed, 11);
  const int n = s.n();
  const BlockPartition& part = s.partition();
  const VectorXd centre = opt.centre.size() == n ? opt.centre : VectorXd::Zero(n);
  auto sample = [&]() -> VectorXd { return centre + opt.radius * gaussian(rng, n); };

  for (int t = 0; t < opt.trials; ++t) {
    const VectorXd x = sample();
    const SurrogateState st = s.make_state(x);
    const double fg = s.value(st);
    const double lower = F(s.map_B(st)) - s.gamma() * s.gap_D();
    const double upper = F(s.map_C(st));
    const double scale = 1.0 + std::abs(fg);
    rep.sandwich = std::max({rep.sandwich, (lower - fg) / scale, (fg - upper) / scale});

    // gradient of one random block against central differences of the value
    const int i = static_cast<int>(rng.below(part.count()));
    const VectorXd gi = s.coord_grad(i, st);
    VectorXd fd(part.size(i));
    for (int k = 0; k < part.size(i); ++k) {
      const int j = part.offset(i) + k;
      const double h = opt.fd_step * (1.0 + std::abs(x[j]));
      VectorXd y = x;
      y[j] = x[j] + h;
      const double fp = s.value_at(y);
      y[j] = x[j] - h;
      const double fm = s.value_at(y);
      fd[k] = (fp - fm) / (2.0 * h);
    }
    rep.gradient = std::max(rep.gradient, (gi - fd).norm() / (1.0 + gi.norm()));

    // convexity along a random segment
    const VectorXd y = sample();
    const double theta = rng.uniform();
    const double fy = s.value_at(y);
    const double fm = s.value_at(theta * x + (1.0 - theta) * y);
    const double chord = theta * fg + (1.0 - theta) * fy;
    rep.convexity = std::max(rep.convexity, (fm - chord) / (1.0 + std::abs(chord)));
  }

  for (int t = 0; t < opt.lipschitz_trials; ++t) {
    const VectorXd x = sample();
    const int i = static_cast<int>(rng.below(part.count()));
    const double mag = opt.radius * std::pow(10.0, -3.0 * rng.uniform());
    const VectorXd h = mag * gaussian(rng, part.size(i));
    if (h.norm() == 0.0) continue;
    SurrogateState st = s.make_state(x);
    const VectorXd a = s.coord_grad(i, st);
    s.apply_step(st, i, h);
    const VectorXd b = s.coord_grad(i, st);
    const double Li = s.coord_lipschitz(i);
    const VectorXd dg = b - a;
    const double bound = Li * h.norm();
    rep.lipschitz = std::max(rep.lipschitz, (dg.norm() - bound) / bound);
    // <dg, h> >= |dg|^2 / L_i
    const double lhs = dg.dot(h), rhs = dg.squaredNorm() / Li;
    const double denom = dg.norm() * h.norm();
    if (denom > 0.0) rep.cocoercivity = std::max(rep.cocoercivity, (rhs - lhs) / denom);
  }

  if (opt.cache_steps > 0) {
    SurrogateState st = s.make_state(sample());
    for (int t = 0; t < opt.cache_steps; ++t) {
      const int i = static_cast<int>(rng.below(part.count()));
      s.apply_step(st, i, 0.1 * opt.radius * gaussian(rng, part.size(i)));
    }
    const SurrogateState fresh = s.make_state(st.x);
    for (std::size_t k = 0; k < st.cache.size(); ++k) {
      const double scale = 1.0 + fresh.cache[k].norm();
      rep.cache = std::max(rep.cache, (st.cache[k] - fresh.cache[k]).norm() / scale);
    }
  }
  return rep;
}

}  // namespace smoothcd
