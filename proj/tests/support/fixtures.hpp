#pragma once

#include <cmath>

#include "mdi/rng.hpp"
#include "mdi/scenario.hpp"

namespace testsupport {

// One large dataset under the default scenario, shared across test cases
// that only need Monte Carlo moments.
inline const mdi::Dataset& default_scenario_1m() {
  static const mdi::Dataset data = [] {
    mdi::RngStream rng(20240, 0);
    return mdi::generate(mdi::ScenarioParams{}, 1000000, rng);
  }();
  return data;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace testsupport
