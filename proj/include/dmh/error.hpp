#pragma once

#include <stdexcept>
#include <string>

namespace dmh {

/// Raised for malformed inputs: unnormalized distributions, bad configs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A log-density evaluated to NaN or infinity at a reachable state.
class NonFiniteDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coupled proposal broke its contract (lost stickiness or changed the
/// primal marginal).
class CouplingViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Internal invariant failure, e.g. a realized branch with probability zero.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dmh
