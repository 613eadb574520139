#pragma once

#include <cstdint>
#include <span>

namespace gsbm {

__extension__ typedef unsigned __int128 u128;

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the n-th output is a pure function of
// (seed, stream, index, n), so draws can be regenerated in any order and on
// any thread. Distributions are implemented here rather than taken from
// <random> because libstdc++'s are not specified bit-for-bit.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
      : key_(mix64(seed + kGolden) ^ mix64(mix64(stream + 2 * kGolden) + index)) {}

  std::uint64_t next() { return mix64(key_ + kGolden * ++counter_); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., bound - 1} (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) {
    u128 m = static_cast<u128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Inverse-CDF draw from a probability vector; never returns a zero-mass index.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double cumulative = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last_positive = static_cast<int>(i);
      cumulative += probs[i];
      if (u < cumulative) return static_cast<int>(i);
    }
    return last_positive;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream identifiers, one per independent use site.
namespace streams {
inline constexpr std::uint64_t kLabels = 1;
inline constexpr std::uint64_t kObservations = 2;
inline constexpr std::uint64_t kMultinomial = 3;
inline constexpr std::uint64_t kPearson = 4;
inline constexpr std::uint64_t kBernstein = 5;
inline constexpr std::uint64_t kPowerMethod = 6;
inline constexpr std::uint64_t kOverlap = 7;
inline constexpr std::uint64_t kChannelDraws = 8;
}  // namespace streams

}  // namespace gsbm
