#pragma once

#include <cstdint>

/// Deterministic pseudo-randomness for all simulations.
///
/// Every stochastic routine in the library draws from Xoshiro256StarStar,
/// seeded through SplitMix64.  Standard-library distributions are never used:
/// the mapping from raw 64-bit outputs to bounded integers, unit-interval
/// doubles and coin flips is fixed here so that a (seed, configuration) pair
/// reproduces the same run byte for byte on every platform.
namespace ballast {

/// SplitMix64: 64-bit state, one output per step.  Used only to expand seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna).  Period 2^256 - 1.
class Xoshiro256StarStar {
 public:
  /// Seed the four state words with four successive SplitMix64 outputs.
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound) via Lemire's multiply-shift with rejection;
  /// unbiased for every bound >= 1.
  std::uint64_t bounded(std::uint64_t bound) {
    // 128-bit multiply keeps the full product; the low half drives rejection.
    unsigned __int128 m =
        static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(bound);
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0ULL - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(bound);
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits: (next() >> 11) * 2^-53.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Fair coin from the top bit of the next output.
  bool coin() { return (next() >> 63) != 0; }

  const std::uint64_t* state() const { return state_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

/// Independent stream for repetition `rep` of a batch run: the first
/// SplitMix64 output of (base_seed XOR rep) seeds that repetition's generator.
inline std::uint64_t rep_seed(std::uint64_t base_seed, std::uint64_t rep) {
  return SplitMix64(base_seed ^ rep).next();
}

}  // namespace ballast
