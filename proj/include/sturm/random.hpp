#pragma once

#include <cstdint>
#include <random>

namespace sturm {

// Deterministic random source: raw mt19937_64 draws with explicit scaling,
// avoiding std distributions whose outputs vary across standard libraries.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n); n = 0 yields 0.
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform real in [lo, hi).
  double real(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sturm
