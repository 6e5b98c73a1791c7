#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lbpcert {

// Reproducible randomness: every draw below maps raw std::mt19937_64 output
// (fully pinned by the C++ standard) through an explicit formula, so the
// same seed yields the same stream on every platform and compiler.

/// Uniform in the open interval (0, 1); consumes one engine draw.
inline double unit_open(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform in [-1, 1); consumes one engine draw.
inline double uniform_pm1(std::mt19937_64& gen) {
  return 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
}

/// Standard normal via the Box-Muller cosine branch; consumes exactly two
/// engine draws per call (the sine branch is discarded so the consumption
/// order stays one call = two draws).
inline double normal(std::mt19937_64& gen) {
  const double u1 = unit_open(gen);
  const double u2 = unit_open(gen);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace lbpcert
