#pragma once

#include <cstdint>
#include <random>

namespace invertkit {

// Deterministic stream over mt19937_64; every helper consumes exactly one
// draw so call sites can reason about stream position.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Uniform in [0, n); n >= 1. Modulo bias is irrelevant at the small n
  // used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace invertkit
