#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace scrible {

/// Counter-based random stream.
///
/// A stream is identified by a (seed, counter, tag) key and produces a
/// SplitMix64 sequence from a hash of that key. Two streams with different
/// keys are statistically independent, and a stream's output never depends
/// on how many values were drawn from any other stream. All derived draws
/// (uniform index, sign, normal) are implemented here rather than through
/// <random> distributions so traces are bit-identical across standard
/// library implementations.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t counter = 0, std::uint64_t tag = 0)
      : state_(mix(mix(seed ^ 0x9E3779B97F4A7C15ULL) ^ mix(counter + 0x632BE59BD9B4E019ULL) ^
                   mix(tag + 0x85157AF5ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return static_cast<std::size_t>(r % bound);
  }

  /// +1 or -1 with probability 1/2 each.
  int sign() { return (next_u64() >> 63) != 0 ? 1 : -1; }

  /// Standard normal via Box-Muller (one value per call, the pair's twin is dropped).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Stream tags, so that distinct consumers of one (seed, round) never collide.
namespace stream_tag {
inline constexpr std::uint64_t dikin_sample = 1;
inline constexpr std::uint64_t sphere_sample = 2;
inline constexpr std::uint64_t environment = 3;
inline constexpr std::uint64_t geometry = 4;
}  // namespace stream_tag

}  // namespace scrible
