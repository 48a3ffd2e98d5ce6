/// @file  rng.hpp
/// @brief Deterministic randomness: stream derivation from a root seed and
///        portable uniform sampling helpers.

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace spose {

/// Mixes a root seed with a stream id (splitmix64 finalizer). Every stochastic
/// stage of the pipeline draws from its own derived stream, so runs are
/// reproducible bit-for-bit regardless of stage order or thread count.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Stream ids, one per pipeline stage that consumes randomness.
namespace streams {
constexpr std::uint64_t kSplit = 1;        ///< train/validation shuffle
constexpr std::uint64_t kInit = 2;         ///< embedding initialization
constexpr std::uint64_t kTruth = 3;        ///< ground-truth entries
constexpr std::uint64_t kTriples = 4;      ///< which triples get sampled
constexpr std::uint64_t kChoices = 5;      ///< choice draws per triple
constexpr std::uint64_t kEpochBase = 1u << 16;  ///< + epoch index
constexpr std::uint64_t kFoldBase = 1u << 24;   ///< + target index (CV folds)
}  // namespace streams

/// mt19937_64 with hand-rolled uniform draws. The engine's output sequence is
/// pinned by the standard; std::uniform_*_distribution is not, so we avoid it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer on [0, n); n must be >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spose
