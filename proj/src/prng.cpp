#include "fdqrank/prng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

namespace fdq {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed + mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next() { return mix64(key_ + (++counter_) * kGolden); }

std::uint64_t CounterRng::uniform_below(std::uint64_t bound) {
  // Largest multiple of bound that fits; draws at or above it are rejected.
  const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
  for (;;) {
    std::uint64_t x = next();
    if (x < limit) return x % bound;
  }
}

double CounterRng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  double u1 = 1.0 - uniform01();  // (0, 1]
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::uint32_t> random_permutation(std::size_t size, CounterRng& rng) {
  std::vector<std::uint32_t> perm(size);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = size; i > 1; --i) {
    std::size_t j = rng.uniform_below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace fdq
