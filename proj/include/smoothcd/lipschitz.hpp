#pragma once

#include <vector>

#include "smoothcd/block_partition.hpp"
#include "smoothcd/rng.hpp"

namespace smoothcd {

// Per-block Lipschitz constants L_i together with the sampling/norm exponent.
class LipschitzProfile {
 public:
  LipschitzProfile(VectorXd values, double alpha);

  const VectorXd& values() const { return values_; }
  double value(int i) const { return values_[i]; }
  double alpha() const { return alpha_; }
  int count() const { return static_cast<int>(values_.size()); }
  double l_max() const { return values_.maxCoeff(); }
  // S_e = sum_i L_i^e
  double s(double exponent) const;
  double s_alpha() const { return s(alpha_); }

 private:
  VectorXd values_;
  double alpha_;
};

// sqrt(sum_i L_i^e ||x_i||^2) for an arbitrary exponent e.
double weighted_norm(const VectorXd& x, const VectorXd& L, double exponent, const BlockPartition& partition);
double weighted_norm(const VectorXd& x, const LipschitzProfile& profile, const BlockPartition& partition);
double dual_weighted_norm(const VectorXd& g, const LipschitzProfile& profile, const BlockPartition& partition);

// Draws block i with probability L_i^e / S_e by inverse CDF.
class Sampler {
 public:
  Sampler(const VectorXd& L, double exponent);
  explicit Sampler(const LipschitzProfile& profile) : Sampler(profile.values(), profile.alpha()) {}

  int draw(Pcg32& rng) const;
  double probability(int i) const { return probs_[i]; }
  int count() const { return static_cast<int>(probs_.size()); }

 private:
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

int sampler_draw(const LipschitzProfile& profile, Pcg32& rng);

}  // namespace smoothcd
