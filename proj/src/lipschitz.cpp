#include "smoothcd/lipschitz.hpp"

#include <algorithm>
#include <cmath>

#include "smoothcd/errors.hpp"

namespace smoothcd {

LipschitzProfile::LipschitzProfile(VectorXd values, double alpha) : values_(std::move(values)), alpha_(alpha) {
  if (values_.size() == 0) throw ArgumentError("empty Lipschitz profile");
  if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  for (double v : values_)
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("Lipschitz constants must be positive and finite");
}

double LipschitzProfile::s(double exponent) const {
  double total = 0.0;
  for (double v : values_) total += std::pow(v, exponent);
  return total;
}

double weighted_norm(const VectorXd& x, const VectorXd& L, double exponent, const BlockPartition& partition) {
  if (x.size() != partition.n()) throw ArgumentError("dimension mismatch in weighted norm");
  if (L.size() != partition.count()) throw ArgumentError("profile and partition disagree on block count");
  double total = 0.0;
  for (int i = 0; i < partition.count(); ++i)
    total += std::pow(L[i], exponent) * x.segment(partition.offset(i), partition.size(i)).squaredNorm();
  return std::sqrt(total);
}

double weighted_norm(const VectorXd& x, const LipschitzProfile& profile, const BlockPartition& partition) {
  return weighted_norm(x, profile.values(), profile.alpha(), partition);
}

double dual_weighted_norm(const VectorXd& g, const LipschitzProfile& profile, const BlockPartition& partition) {
  return weighted_norm(g, profile.values(), -profile.alpha(), partition);
}

Sampler::Sampler(const VectorXd& L, double exponent) {
  if (L.size() == 0) throw ArgumentError("empty sampler");
  probs_.resize(L.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < L.size(); ++i) {
    if (!(L[i] > 0.0)) throw ArgumentError("sampler weights must be positive");
    probs_[i] = std::pow(L[i], exponent);
    total += probs_[i];
  }
  cumulative_.resize(probs_.size());
  double run = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    probs_[i] /= total;
    run += probs_[i];
    cumulative_[i] = run;
  }
  cumulative_.back() = 1.0;
}

int Sampler::draw(Pcg32& rng) const {
  if (cumulative_.size() == 1) return 0;
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<int>(it - cumulative_.begin());
}

int sampler_draw(const LipschitzProfile& profile, Pcg32& rng) { return Sampler(profile).draw(rng); }

}  // namespace smoothcd
