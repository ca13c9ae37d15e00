#pragma once

#include <optional>
#include <vector>

namespace smoothcd {

// ceil(sqrt(4 N^2 delta0^((2-q)/q) / (kappa^(2/q) alpha)))
long restart_period(int N, double q_bar, double kappa_bar, double alpha_restart, double delta0 = 0.0);

// Growth constant of the Moreau envelope given q-growth (q, kappa) of F; R bounds the
// distance to the solution set and is used only when q < 2.
double growth_constant_me(double q, double kappa, double gamma, double R = 0.0);
double growth_constant_fb(double q, double kappa, double gamma, double L, double L_max, double R = 0.0);
double growth_constant_ns(double q, double kappa, double L_max, std::optional<double> R = std::nullopt);

// Contraction factor of coordinate descent under q-growth.
double contraction_C1(double kappa_bar, double q_bar, int N, double Delta0 = 1.0);

struct RateConstants {
  double kappa_hat = 0.0;
  double kappa_bar = 0.0;
  double q_bar = 2.0;
  double C1 = 0.0;
  double eta = 0.0;
  double Delta0 = 0.0;
  double R = 0.0;
  long K_alpha = 0;
};

}  // namespace smoothcd
