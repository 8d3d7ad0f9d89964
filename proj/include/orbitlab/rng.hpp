#pragma once

#include <cstdint>
#include <random>

#include "orbitlab/errors.hpp"

namespace orbitlab {

// Deterministic random source. Draws go through fixed bit manipulations
// rather than std distributions, whose outputs vary across standard
// libraries; reports stay byte-identical for a fixed seed everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0, by rejection on the top range.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw InvalidSpecError("uniform_int needs n > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace orbitlab
