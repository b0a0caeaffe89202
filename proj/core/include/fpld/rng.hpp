#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fpld {

/// xoshiro256** generator with SplitMix64 seeding and deterministic
/// substream derivation. Satisfies UniformRandomBitGenerator.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  /// Independent child stream; depends only on this state and `stream`.
  Rng split(std::uint64_t stream) const;

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Marsaglia polar).
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// +1 or -1 with equal probability.
  int sign() { return ((*this)() >> 63) ? 1 : -1; }
  bool bernoulli(double p) { return uniform() < p; }

private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Exact Bin(n, p) draw (popcount for p = 1/2, geometric skipping otherwise).
std::uint64_t sample_binomial(Rng& rng, std::uint64_t n, double p);
/// Gamma(shape, 1) draw (Marsaglia-Tsang).
double sample_gamma(Rng& rng, double shape);
double sample_chi_square(Rng& rng, double dof);

}  // namespace fpld
