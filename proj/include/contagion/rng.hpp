#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace contagion {

/// SplitMix64 finalizer. Used only to expand seeds into generator state.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** with (seed, stream) keyed initialization.
///
/// Every replica of a Monte Carlo run owns the stream `(seed, replica)`, so the
/// numbers a replica sees do not depend on which worker runs it or in what
/// order. Uniform and exponential variates are derived here rather than through
/// <random> distributions, whose algorithms are implementation-defined; this
/// keeps output bit-identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t a = seed;
    std::uint64_t key = splitmix64(a);
    std::uint64_t b = stream ^ 0xD1B54A32D192ED03ULL;
    key ^= splitmix64(b);
    for (auto& word : s_) word = splitmix64(key);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Exponential(1); strictly positive, never infinite.
  double exponential() noexcept { return -std::log1p(-uniform()); }

  /// Uniform integer on [0, n), n > 0 (multiply-shift, bias below 2^-64 * n).
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
};

}  // namespace contagion
