#pragma once

// Stochastic-derivative weights for a single accept/reject decision and the
// pruning rule that keeps one tracked alternative per chain.

#include <cmath>
#include <sstream>

#include "dmh/dual.hpp"
#include "dmh/error.hpp"
#include "dmh/random.hpp"

namespace dmh {

/// Nonnegative weight attached to an alternative branch.
class BranchWeight {
 public:
  constexpr BranchWeight() = default;
  explicit BranchWeight(double w) : w_(w) {
    if (!(w >= 0.0)) {
      std::ostringstream msg;
      msg << "branch weight must be nonnegative, got " << w;
      throw InvalidState(msg.str());
    }
  }

  [[nodiscard]] constexpr double value() const { return w_; }
  [[nodiscard]] constexpr bool is_zero() const { return w_ == 0.0; }

  friend constexpr bool operator==(BranchWeight, BranchWeight) = default;

 private:
  double w_ = 0.0;
};

/// Rate at which the realized accept/reject outcome flips as the parameter
/// moves, normalized by the probability of the realized outcome.
///
///   accepted: max(0, -dα) / α
///   rejected: max(0,  dα) / (1 - α)
inline BranchWeight flip_weight(Dual alpha, bool accepted) {
  if (!(alpha.value >= 0.0 && alpha.value <= 1.0)) {
    std::ostringstream msg;
    msg << "acceptance probability out of [0,1]: " << alpha.value;
    throw InvalidState(msg.str());
  }
  if (accepted) {
    if (alpha.value == 0.0) throw InvalidState("accepted a move with acceptance probability 0");
    return BranchWeight(std::max(0.0, -alpha.deriv) / alpha.value);
  }
  if (alpha.value == 1.0) throw InvalidState("rejected a move with acceptance probability 1");
  return BranchWeight(std::max(0.0, alpha.deriv) / (1.0 - alpha.value));
}

struct PruneResult {
  BranchWeight combined;
  bool take_new = false;
};

/// Keep either the previously tracked alternative or the new candidate, the
/// new one with probability w_new / (w_prev + w_new). Always consumes one draw.
inline PruneResult prune(BranchWeight w_prev, BranchWeight w_new, DrawStream& rng) {
  const double u = rng.uniform();
  const BranchWeight combined(w_prev.value() + w_new.value());
  return {combined, u * combined.value() < w_new.value()};
}

}  // namespace dmh
