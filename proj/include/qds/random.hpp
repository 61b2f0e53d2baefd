#pragma once

#include <cstdint>
#include <random>

namespace qds {

// Uniform random source with a fully specified bit-level mapping from engine
// output to doubles, so results reproduce across platforms and worker counts.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  // Stream for trial `index` of an experiment keyed by `master_seed`.
  // Counter-based: the engine seed is a hash of (master_seed, index), so the
  // stream for a trial does not depend on execution order or scheduling.
  static RandomSource for_trial(std::uint64_t master_seed, std::uint64_t index) {
    return RandomSource(mix(master_seed + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  // Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform sign in {-1, +1}.
  int sign() { return (engine_() & 1u) ? 1 : -1; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::mt19937_64 engine_;
};

}  // namespace qds
