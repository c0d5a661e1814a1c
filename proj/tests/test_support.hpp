#pragma once

#include <cmath>
#include <random>

#include "rephase/physical_rates.hpp"

namespace rephase::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(0x5eed'cafe'2024ULL);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Density-sweep rate scalings at mean density n (units of 1e12 cm^-3).
inline RateSet sweep_rates(double n) {
  RateSet r;
  r.delta0 = hz_to_rad(2.0);
  r.omega_ex = hz_to_rad(7.5 * n);
  r.exchange_renorm = 0.6;
  r.gamma_c = 2.1 * n;
  return r;
}

}  // namespace rephase::test
