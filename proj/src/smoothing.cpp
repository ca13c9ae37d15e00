#include "smoothcd/smoothing.hpp"

#include "smoothcd/errors.hpp"

namespace smoothcd {

SurrogateState combine(double a, const SurrogateState& s, double b, const SurrogateState& t) {
  if (s.cache.size() != t.cache.size()) throw ArgumentError("cannot combine states of different surrogates");
  SurrogateState out;
  out.x = a * s.x + b * t.x;
  out.cache.resize(s.cache.size());
  for (std::size_t k = 0; k < s.cache.size(); ++k) out.cache[k] = a * s.cache[k] + b * t.cache[k];
  out.warm = s.warm;
  return out;
}

SmoothSurrogate::SmoothSurrogate(double gamma, BlockPartition partition) : gamma_(gamma), partition_(std::move(partition)) {
  if (!(gamma_ > 0.0)) throw ArgumentError("smoothing parameter gamma must be positive");
}

void SmoothSurrogate::apply_step(SurrogateState& s, int i, const VectorXd& h) const {
  if (h.size() != partition_.size(i)) throw ArgumentError("step length does not match block size");
  s.x.segment(partition_.offset(i), partition_.size(i)) += h;
  update_cache(s, i, h);
}

void SmoothSurrogate::update_cache(SurrogateState&, int, const VectorXd&) const {}

void SmoothSurrogate::check_state(const SurrogateState& s) const {
  if (s.x.size() != n()) throw ArgumentError("state dimension does not match the surrogate");
}

double huber(double t, double gamma) { return t <= gamma ? t * t / (2.0 * gamma) : t - 0.5 * gamma; }

}  // namespace smoothcd
