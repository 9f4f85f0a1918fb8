#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dpp {

// Seed for the reproducible samplers. Same seed + same inputs gives the
// same subset on every platform and for every thread count.
struct RngSeed {
  std::uint64_t value = 0;
};

// Uniform double in [0, 1) from the top 53 bits of the generator output.
// std::uniform_real_distribution is implementation-defined, so it is not
// usable for cross-platform reproducibility.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Seed-splitting rule for independent draws: draw j runs on
// seed XOR (j * 0x9E3779B97F4A7C15).
inline RngSeed derive_seed(RngSeed base, std::uint64_t j) {
  return RngSeed{base.value ^ (j * 0x9E3779B97F4A7C15ULL)};
}

// Deterministic standard normal via Box-Muller on uniform01. Used for
// synthetic feature matrices (benchmarks, tests).
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace dpp
