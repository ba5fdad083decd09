#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace smlab {

/// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of the stream for replication `index` under master `seed`.
///
/// Streams are addressed, not consumed: the key depends only on (seed, index),
/// so the numbers a replication sees do not depend on which worker ran it or
/// in what order.
constexpr std::uint64_t child_key(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(index * 0xd1b54a32d192ed03ULL + 1));
}

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& s : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      s = mix64(x);
    }
  }

  /// Independent stream for replication `index`.
  static Rng child(std::uint64_t seed, std::uint64_t index) noexcept {
    return Rng(child_key(seed, index));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  double exponential(double rate) noexcept { return -std::log(uniform_pos()) / rate; }

  /// Standard normal by the Marsaglia polar method (second variate discarded
  /// so the generator state is the only state).
  double normal() noexcept {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  /// Gamma(shape, rate) by Marsaglia-Tsang, with the shape < 1 boost.
  double gamma(double shape, double rate) noexcept {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace smlab
