#pragma once

#include <cstdint>
#include <vector>

namespace fdq {

/// Counter-based generator: draw i (0-based) of stream (seed, stream) is
///
///   key   = mix64(seed + mix64(stream + 0x9E3779B97F4A7C15))
///   x_i   = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
///
/// where mix64 is the SplitMix64 finalizer. Output depends only on
/// (seed, stream, i), so it is identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static std::uint64_t mix64(std::uint64_t z);

  std::uint64_t next();
  /// Uniform on [0, bound), bound > 0; rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Standard normal via Box-Muller (cosine branch only).
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform random permutation of 0..size-1 by Fisher-Yates.
std::vector<std::uint32_t> random_permutation(std::size_t size, CounterRng& rng);

}  // namespace fdq
