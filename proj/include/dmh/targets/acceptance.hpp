#pragma once

// Metropolis-Hastings acceptance probability and its parameter derivative.

#include <cmath>
#include <concepts>
#include <sstream>
#include <string>

#include "dmh/dual.hpp"
#include "dmh/error.hpp"

namespace dmh {

/// A target exposing log g_θ(x) with its θ-derivative.
template <class T>
concept DensityTarget = requires(const T& t, const typename T::state_type& s) {
  { t.log_density(s) } -> std::convertible_to<Dual>;
};

namespace detail {

template <class State>
std::string describe_state(const State& s) {
  if constexpr (requires(std::ostream& os) { os << s; }) {
    std::ostringstream out;
    out << s;
    return out.str();
  } else {
    return "<unprintable state>";
  }
}

template <DensityTarget T>
Dual checked_log_density(const T& target, const typename T::state_type& s) {
  const Dual lg = target.log_density(s);
  if (!isfinite(lg)) {
    throw NonFiniteDensity("non-finite log-density " + detail::describe_state(lg) + " at state " +
                           describe_state(s));
  }
  return lg;
}

}  // namespace detail

/// α = min(1, exp(Δ)) with Δ the log acceptance ratio. For Δ ≥ 0 the
/// derivative is taken as 0, including the kink at Δ = 0.
inline Dual acceptance_from_log_ratio(Dual delta) {
  if (delta.value >= 0.0) return Dual::constant(1.0);
  return exp(delta);
}

/// α(x' | x) for a target and a proposal with the given
/// log q(x | x') - log q(x' | x) correction (0 when symmetric).
template <DensityTarget T>
Dual acceptance(const T& target, double proposal_logratio_correction, const typename T::state_type& x,
                const typename T::state_type& x_prime) {
  const Dual delta = detail::checked_log_density(target, x_prime) - detail::checked_log_density(target, x) +
                     Dual::constant(proposal_logratio_correction);
  return acceptance_from_log_ratio(delta);
}

}  // namespace dmh
