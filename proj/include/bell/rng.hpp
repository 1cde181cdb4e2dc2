#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bell::rng {

// SplitMix64 finalizer: full-avalanche 64-bit mixing step.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Stateless counter-based stream. Every draw is a pure function of
// (key, counter), so the same key and counter give the same value no matter
// which thread or evaluation order asks. substream() derives independent
// child keys; the (seed, pair, shot) keying contract of the simulator is
// built from exactly these two calls.
class Stream {
 public:
  explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {}

  constexpr Stream substream(std::uint64_t index) const noexcept {
    return Stream(mix64(key_ + kGolden * (index + 1)));
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ + kGolden * (counter + 1));
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

inline constexpr Stream master(std::uint64_t seed) noexcept {
  return Stream(mix64(seed ^ 0xD1B54A32D192ED03ull));
}

// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
inline double normal(const Stream& s, std::uint64_t k) {
  const double u1 = 1.0 - s.uniform(2 * k);  // (0, 1], keeps log() finite
  const double u2 = s.uniform(2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bell::rng
