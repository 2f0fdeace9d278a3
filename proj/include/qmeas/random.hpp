#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace qmeas {

/// SplitMix64 finalizer; used to turn (seed, index) pairs into stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the sub-stream for event `index` of a run seeded with `seed`:
/// splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Seedable random stream. Bit-exact across platforms: draws are built from
/// raw mt19937_64 output rather than the implementation-defined std distributions.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Independent sub-stream for work item `index`.
  static RandomStream derived(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(derive_seed(seed, index));
  }

  std::uint64_t seed() const { return seed_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

  std::uint64_t next() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Inverse-CDF draw over a probability vector. Zero-weight entries are never
/// selected. Weights must be non-negative; they need not be normalized.
std::size_t sample_index(std::span<const double> weights, RandomStream& rng);

}  // namespace qmeas
