#include "fpld/rng.hpp"

#include <cmath>

namespace fpld {

namespace {
__extension__ typedef unsigned __int128 u128;
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto& w : s_) w = splitmix64(st);
}

Rng Rng::split(std::uint64_t stream) const {
  std::uint64_t st = s_[0] ^ rotl(s_[1], 17) ^ rotl(s_[2], 31) ^ rotl(s_[3], 47);
  std::uint64_t mix = stream;
  st ^= splitmix64(mix);
  Rng child(0);
  for (auto& w : child.s_) w = splitmix64(st);
  return child;
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's nearly divisionless method.
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace fpld

namespace fpld {

std::uint64_t sample_binomial(Rng& rng, std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p == 0.5) {
    std::uint64_t count = 0;
    std::uint64_t left = n;
    while (left >= 64) {
      count += static_cast<std::uint64_t>(__builtin_popcountll(rng()));
      left -= 64;
    }
    if (left > 0) count += static_cast<std::uint64_t>(__builtin_popcountll(rng() >> (64 - left)));
    return count;
  }
  if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
  // Geometric skipping: positions of successes are separated by Geom(p) gaps.
  const double log_q = std::log1p(-p);
  std::uint64_t count = 0;
  double pos = -1.0;
  for (;;) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    pos += std::floor(std::log(u) / log_q) + 1.0;
    if (pos >= static_cast<double>(n)) break;
    ++count;
  }
  return count;
}

double sample_gamma(Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = 1.0 - rng.uniform();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_chi_square(Rng& rng, double dof) { return 2.0 * sample_gamma(rng, 0.5 * dof); }

}  // namespace fpld
