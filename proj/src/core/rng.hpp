#pragma once

// Seeded random streams. Each named stream is an independent mt19937_64 whose
// state is derived from (seed, stream name, index) through std::seed_seq, so
// sequences are reproducible across platforms and independent of scheduling.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "geometry.hpp"

namespace sforge {

class Rng {
 public:
  Rng(uint64_t seed, std::string_view stream, uint64_t index = 0) {
    const uint64_t h = fnv1a(stream);
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(h),
                      static_cast<uint32_t>(h >> 32), static_cast<uint32_t>(index),
                      static_cast<uint32_t>(index >> 32)};
    eng_.seed(seq);
  }

  uint64_t next() { return eng_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  int index(int n) { return static_cast<int>(uniform() * n); }

 private:
  static uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }
  std::mt19937_64 eng_;
};

}  // namespace sforge
