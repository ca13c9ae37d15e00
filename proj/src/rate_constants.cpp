#include "smoothcd/rate_constants.hpp"

#include <algorithm>
#include <cmath>

#include "smoothcd/errors.hpp"

namespace smoothcd {

namespace {

void check_q(double q) {
  if (!(q >= 1.0 && q <= 2.0)) throw ArgumentError("growth exponent q must lie in [1, 2]");
}

}  // namespace

long restart_period(int N, double q_bar, double kappa_bar, double alpha_restart, double delta0) {
  check_q(q_bar);
  if (N < 1) throw ArgumentError("block count must be positive");
  if (!(kappa_bar > 0.0)) throw ArgumentError("kappa_bar must be positive");
  if (!(alpha_restart > 0.0 && alpha_restart <= 1.0)) throw ArgumentError("restart contraction must lie in (0, 1]");
  if (delta0 < 0.0) throw ArgumentError("initial gap must be nonnegative");
  const double num = 4.0 * double(N) * double(N) * (q_bar == 2.0 ? 1.0 : std::pow(delta0, (2.0 - q_bar) / q_bar));
  const double den = std::pow(kappa_bar, 2.0 / q_bar) * alpha_restart;
  const double v = std::sqrt(num / den);
  // keep exact integers from being pushed up by roundoff
  const double r = std::round(v);
  const long k = std::abs(v - r) <= 1e-12 * std::max(1.0, v) ? static_cast<long>(r) : static_cast<long>(std::ceil(v));
  return std::max(1L, k);
}

double growth_constant_me(double q, double kappa, double gamma, double R) {
  check_q(q);
  if (!(kappa > 0.0) || !(gamma > 0.0)) throw ArgumentError("kappa and gamma must be positive");
  if (q == 2.0) return kappa * gamma / (gamma * kappa + 1.0);
  if (!(R > 0.0)) throw ArgumentError("q < 2 needs a positive radius R");
  const double d = kappa * gamma + std::pow(R, 2.0 - q);
  return kappa * kappa * gamma * gamma / (d * d);
}

double growth_constant_fb(double q, double kappa, double gamma, double L, double L_max, double R) {
  check_q(q);
  if (!(kappa > 0.0) || !(gamma > 0.0) || !(L_max > 0.0) || L < 0.0) throw ArgumentError("constants must be positive");
  const double s = 1.0 - gamma * L;
  if (!(s > 0.0)) throw ArgumentError("forward-backward growth constant needs gamma * L < 1");
  if (q == 2.0) return kappa * s / ((gamma * kappa + s) * L_max);
  if (!(R > 0.0)) throw ArgumentError("q < 2 needs a positive radius R");
  const double d = kappa * gamma + std::pow(R, 2.0 - q) * s;
  return kappa * kappa * gamma * s / (d * d * L_max);
}

double growth_constant_ns(double q, double kappa, double L_max, std::optional<double> R) {
  check_q(q);
  if (!(kappa > 0.0) || !(L_max > 0.0)) throw ArgumentError("kappa and L_max must be positive");
  if (!R) return kappa / (2.0 * q * std::pow(L_max, q / 2.0));
  if (!(*R > 0.0)) throw ArgumentError("radius R must be positive");
  return kappa / (q * L_max * std::pow(*R, 2.0 - q));
}

double contraction_C1(double kappa_bar, double q_bar, int N, double Delta0) {
  check_q(q_bar);
  if (!(kappa_bar > 0.0) || N < 1) throw ArgumentError("kappa_bar and N must be positive");
  const double denom = double(N) * (1.0 + kappa_bar);
  if (q_bar == 2.0) return 1.0 - kappa_bar / denom;
  if (!(Delta0 > 0.0)) throw ArgumentError("Delta0 must be positive");
  const double eta = std::min(kappa_bar, std::pow(kappa_bar, 2.0 / q_bar));
  return std::max(1.0 - kappa_bar * std::pow(Delta0, (q_bar - 2.0) / 2.0) / denom, 1.0 - eta / denom);
}

}  // namespace smoothcd
