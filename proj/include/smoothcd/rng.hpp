#pragma once

#include <cstdint>

namespace smoothcd {

// Permuted congruential generator (PCG-XSH-RR): 64-bit LCG state, 32-bit
// output with an xorshift-high + random-rotate permutation.
//
// Streams are selected by an odd increment derived from `stream`. Sequences
// are reproducible for a given (seed, stream) within a build.
class Pcg32 {
 public:
  using result_type = std::uint32_t;

  explicit Pcg32(std::uint64_t seed = 0x853c49e6748fea9bULL, std::uint64_t stream = 0xda3e39cb94b95bdbULL);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via the Marsaglia polar method.
  double normal();
  // Uniform integer in [0, bound).
  std::uint32_t below(std::uint32_t bound);

  // UniformRandomBitGenerator interface
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }
  result_type operator()() { return next_u32(); }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives well-separated 64-bit seeds from one master seed.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace smoothcd
