#pragma once

#include <cstdint>
#include <string>

namespace circfuzz {

// Seed-splittable generator used everywhere randomness is needed.  The
// algorithm identifier below is echoed into campaign metadata so that a
// report bundle records exactly which stream produced it.
inline constexpr const char* kRngAlgorithm = "splitmix64-v1";

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64_step(state_); }

  // Unbiased value in [0, n); n must be nonzero.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t v = next();
      if (v >= threshold) return v % n;
    }
  }

  // Value in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  // Geometric count with the given success probability, capped.
  int geometric(double p, int cap) {
    int n = 0;
    while (n < cap && !chance(p)) ++n;
    return n;
  }

  // Independent child stream; child streams for distinct indices never
  // collide with the parent or each other in practice.
  Rng split(std::uint64_t index) const {
    std::uint64_t s = state_ ^ (0xD1B54A32D192ED03ull * (index + 1));
    std::uint64_t mixed = s;
    return Rng(splitmix64_step(mixed));
  }

 private:
  std::uint64_t state_;
};

}  // namespace circfuzz
