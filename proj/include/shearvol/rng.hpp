#pragma once

// Counter-based random numbers for the phantom generators.
//
// Every variate is a pure function of (seed, stream, counter), so generation
// order and thread count cannot change results, and any draw can be
// re-derived independently:
//
//   key(seed, stream) = mix(seed ^ mix(stream))
//   bits(counter)     = mix(key ^ mix(counter))
//   uniform(counter)  = (bits(counter) >> 11) * 2^-53          in [0, 1)
//
// where mix is the SplitMix64 output function applied to x + 0x9E3779B97F4A7C15.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace shearvol::rng {

constexpr std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter)); }

  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller from counters 2c and 2c + 1.
  double normal(std::uint64_t counter) const {
    const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Gamma(shape, scale 1/shape), i.e. unit mean, for shape >= 1, by
  /// Marsaglia-Tsang. Attempt t of sample s uses normal counter
  /// s * 256 + 2t and uniform counter 2 * (s * 256 + 2t + 1).
  double unit_mean_gamma(double shape, std::uint64_t sample) const {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (std::uint64_t t = 0; t < 128; ++t) {
      const std::uint64_t base = sample * 256 + 2 * t;
      const double x = normal(base);
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform(2 * (base + 1));
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / shape;
    }
    return 1.0;
  }

 private:
  std::uint64_t key_;
};

/// Stream identifiers used by the phantom generators.
enum Stream : std::uint64_t {
  kSpeckle = 1,
  kAdditive = 2,
  kFrames = 3,
  kRowJitter = 4,
  kVesselLayout = 5,
};

}  // namespace shearvol::rng
