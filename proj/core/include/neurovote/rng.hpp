#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace neurovote {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// SplitMix64 finalizer (Stafford variant 13).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Sub-seed for a named stream, e.g. derive_seed(root, "NN") for concept NN.
std::uint64_t derive_seed(std::uint64_t root, std::string_view name) noexcept;

/// Counter-based SplitMix64 generator.
///
/// Output i (0-based) is mix64(seed + (i + 1) * 0x9E3779B97F4A7C15), so the
/// stream is fully determined by (seed, counter) and can be reproduced in any
/// language. All derived distributions below are defined in terms of
/// next_u64() so results never depend on a standard library's distribution
/// implementation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept;

  /// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  /// Independent child stream keyed by name.
  SplitMix64 split(std::string_view name) const noexcept {
    return SplitMix64(derive_seed(seed_, name));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace neurovote
