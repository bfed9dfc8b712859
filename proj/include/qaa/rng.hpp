#pragma once
/// Deterministic random-number utilities.
///
/// All stochastic routines in the library accept a 64-bit seed and derive
/// per-sample sub-seeds with a SplitMix64 mix, so results are reproducible
/// bit-for-bit regardless of how work is split across threads: sample k of a
/// run always sees the same generator state no matter which worker handles it.

#include <cstdint>
#include <random>

namespace qaa {

/// SplitMix64 finalizer: a high-quality 64-bit mixing function.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Sub-seed for sample `index` of a run seeded with `seed`.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

/// Mersenne-twister wrapper producing doubles with 53 random bits.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with full double precision (53 bits).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t raw() { return gen_(); }

private:
  std::mt19937_64 gen_;
};

}  // namespace qaa
