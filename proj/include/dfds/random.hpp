#pragma once

// Deterministic random stream. std::mt19937_64 output is bit-exact across
// implementations, but the standard <random> distributions are not, so the
// mappings to doubles live here: a 53-bit uniform and a Box-Muller normal
// pair that consumes exactly two engine draws. Every consumer of randomness
// in the library takes a RandomStream& so seeded runs replay exactly.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace dfds {

// SplitMix64 finalizer; used to derive well-separated child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Child seed for (base, stream, index). Streams are stable identifiers
// (e.g. one per algorithm), so adding a stream never perturbs another.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream,
                              std::uint64_t index) {
  std::uint64_t z = splitmix64(base ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
  return splitmix64(z ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_bits() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution, one engine draw.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log argument. One engine draw.
  double uniform01_positive() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform on [lo, hi). One engine draw.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal pair via Box-Muller; exactly two engine draws.
  std::pair<double, double> normal_pair() {
    const double u1 = uniform01_positive();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dfds
