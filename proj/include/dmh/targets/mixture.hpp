#pragma once

// Posterior over the source component of a three-component Gaussian mixture,
// given one observation h. Components are indexed 0, 1, 2.

#include <array>
#include <cmath>
#include <cstddef>

#include "dmh/dual.hpp"

namespace dmh {

struct MixtureModel {
  std::array<double, 3> means{-2.5, 2.0, 5.0};
  double sigma = 4.0;
};

/// Unnormalized P(J = j | H = h) ∝ P(H = h | J = j) P(J = j), differentiated in h.
struct MixtureTarget {
  using state_type = std::size_t;

  MixtureModel model{};
  double observation = 0.0;

  [[nodiscard]] static constexpr std::size_t num_states() { return 3; }

  [[nodiscard]] Dual log_density(std::size_t j) const {
    const double s2 = model.sigma * model.sigma;
    const double r = observation - model.means[j];
    // uniform prior; cancels in every ratio
    const double log_prior = -std::log(3.0);
    return {log_prior - r * r / (2.0 * s2), -r / s2};
  }
};

}  // namespace dmh
