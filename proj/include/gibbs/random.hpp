#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace gibbs {

/// 64-bit golden-ratio constant used to derive substream seeds.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Seed of substream `index` under `master`:
/// master XOR (kGoldenGamma * (index + 1)) with wrapping multiplication.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return master ^ (kGoldenGamma * (index + 1));
}

/// Explicitly passed source of randomness. Wraps std::mt19937_64 so every
/// draw in the library goes through one documented engine.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream for task `index` of a run seeded with `master`.
  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(substream_seed(master, index));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }  // [0, 1)
  std::uint64_t bits() { return engine_(); }

  /// Index drawn from an (unnormalized, non-negative) weight vector.
  std::size_t categorical(std::span<const double> weights);

  /// Uniform index in [0, count).
  std::size_t index(std::size_t count);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace gibbs
