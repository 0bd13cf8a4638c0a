#pragma once

#include "dmh/dual.hpp"

namespace dmh {

/// N(θ, 1) known up to normalization; θ is the mean.
struct GaussianTarget {
  using state_type = double;

  double mean = 0.0;

  [[nodiscard]] Dual log_density(double x) const {
    const double r = x - mean;
    return {-0.5 * r * r, r};
  }
};

}  // namespace dmh
