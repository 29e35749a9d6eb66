#pragma once

#include <random>

#include "revroa/model.hpp"

namespace revroa::test {

inline Scenario smooth_reference() {
  Scenario sc = Scenario::reference();
  sc.params.sat_mode = SatMode::Smooth;
  return sc;
}

inline Scenario no_ramp(Scenario sc) {
  sc.ramp_enabled = false;
  return sc;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace revroa::test
