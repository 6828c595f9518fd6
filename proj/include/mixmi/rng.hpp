#pragma once

#include <cstdint>
#include <limits>

namespace mixmi {

/// Stateless splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the independent stream `index` derived from `master`.
/// Order independent: the value only depends on the pair.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index ^ 0x6a09e667f3bcc909ULL));
}

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t s_[4];
};

// Samplers are written out rather than taken from <random> so that draws are
// identical across standard library implementations.

double standard_normal(Xoshiro256& rng) noexcept;

/// Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1.
double gamma_variate(Xoshiro256& rng, double shape) noexcept;

inline double chi_squared(Xoshiro256& rng, double df) noexcept {
  return 2.0 * gamma_variate(rng, 0.5 * df);
}

}  // namespace mixmi
