#pragma once

#include <cstdint>
#include <random>

namespace pinlab {

/// SplitMix64 finalizer; used to derive well-separated seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `index` of the experiment seeded with `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// An independent random stream keyed by (seed, index). Streams with distinct
/// keys are reproducible regardless of the order in which they are consumed.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed, std::uint64_t index = 0)
      : engine_(derive_seed(seed, index)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pinlab
