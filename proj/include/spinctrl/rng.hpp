// Counter-based deterministic random number generation.
//
// Each (seed, stream) pair yields an independent, platform-stable sequence,
// so parallel bath realizations reproduce bit-exactly regardless of thread
// scheduling.  The generator is splitmix64; distributions are hand-rolled on
// top of it to avoid unspecified standard-library variation.
#pragma once

#include <cmath>
#include <cstdint>

namespace spinctrl {

class Rng {
 public:
  /// Independent substream `stream` of the master `seed`.
  Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

  /// Poisson-distributed count via unit-exponential arrivals (exact
  /// distribution, O(lambda) cost, no platform-dependent branches).
  std::uint64_t poisson(double lambda) {
    std::uint64_t k = 0;
    double acc = 0.0;
    while (true) {
      acc -= std::log(uniform_pos());
      if (acc > lambda) return k;
      ++k;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace spinctrl
