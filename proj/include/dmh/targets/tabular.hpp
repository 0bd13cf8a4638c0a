#pragma once

#include <cstddef>
#include <vector>

#include "dmh/dual.hpp"

namespace dmh {

/// Finite state space with explicitly listed log-weights and their derivatives.
struct TabularTarget {
  using state_type = std::size_t;

  std::vector<Dual> log_weights;

  [[nodiscard]] std::size_t num_states() const { return log_weights.size(); }
  [[nodiscard]] Dual log_density(std::size_t s) const { return log_weights.at(s); }
};

}  // namespace dmh
