#pragma once

// Coupled proposals q_xy(x', y' | x, y).
//
// Contract for every coupling used by the differentiable sampler:
//   * marginals: x' ~ q(. | x) and y' ~ q(. | y);
//   * stickiness: x == y implies x' == y';
//   * the primal move is produced by the marginal proposal reading
//     StepDraws::proposal(), so the primal path never depends on the coupling.

#include <cmath>
#include <concepts>
#include <span>
#include <utility>
#include <vector>

#include "dmh/error.hpp"
#include "dmh/proposals.hpp"
#include "dmh/random.hpp"
#include "dmh/targets/ising.hpp"

namespace dmh {

template <class C, class State>
concept CoupledProposal = requires(const C& c, const State& x, const StepDraws& d) {
  typename C::move_type;
  { c.sample_pair(x, x, d) } -> std::same_as<std::pair<typename C::move_type, typename C::move_type>>;
};

// ---------------------------------------------------------------------------
// Common random numbers

/// Both proposals are the same deterministic map applied to identical draws.
template <class P, class State>
std::pair<typename P::move_type, typename P::move_type> crn_couple(const P& p, const State& x, const State& y,
                                                                   const DrawStream& draws) {
  DrawStream a = draws;
  DrawStream b = draws;
  auto mx = p.propose(x, a);
  auto my = p.propose(y, b);
  return {std::move(mx), std::move(my)};
}

template <class P>
struct CrnCoupling {
  using move_type = typename P::move_type;

  P proposal;

  template <class State>
  [[nodiscard]] std::pair<move_type, move_type> sample_pair(const State& x, const State& y, const StepDraws& d) const {
    return crn_couple(proposal, x, y, d.proposal());
  }
};

// ---------------------------------------------------------------------------
// Maximal reflection coupling of Gaussian random-walk proposals

namespace detail {

// Given x' = x + σξ, either meet (y' = x') or reflect (y' = x + y - x').
inline double reflection_partner(double x, double y, double x_prime, double sigma, double u) {
  if (x == y) return x_prime;
  const double zx = (x_prime - x) / sigma;
  const double zy = (x_prime - y) / sigma;
  // φ(zy) / φ(zx)
  const double ratio = std::exp(0.5 * (zx * zx - zy * zy));
  if (u <= ratio) return x_prime;
  return x + y - x_prime;
}

}  // namespace detail

inline std::pair<double, double> reflection_maximal_gaussian(double x, double y, double sigma, DrawStream& rng) {
  if (!(sigma > 0.0)) throw InvalidArgument("reflection coupling needs sigma > 0");
  const double x_prime = x + sigma * rng.normal();
  const double u = rng.uniform();
  return {x_prime, detail::reflection_partner(x, y, x_prime, sigma, u)};
}

struct ReflectionMaximalCoupling {
  using move_type = double;

  double sigma = 1.0;

  [[nodiscard]] std::pair<double, double> sample_pair(double x, double y, const StepDraws& d) const {
    DrawStream pr = d.proposal();
    const double x_prime = GaussianRandomWalk{sigma}.propose(x, pr);
    DrawStream cr = d.coupling();
    return {x_prime, detail::reflection_partner(x, y, x_prime, sigma, cr.uniform())};
  }
};

// ---------------------------------------------------------------------------
// Maximal coupling of two discrete distributions

namespace detail {

inline std::size_t maximal_partner(std::size_t x_prime, std::span<const double> px, std::span<const double> py,
                                   DrawStream& rng) {
  const double u = rng.uniform();
  if (u * px[x_prime] <= py[x_prime]) return x_prime;
  std::vector<double> residual(py.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < py.size(); ++i) {
    residual[i] = std::max(0.0, py[i] - px[i]);
    mass += residual[i];
  }
  if (!(mass > 0.0)) throw InvalidState("maximal coupling residual has no mass");
  for (double& r : residual) r /= mass;
  return inverse_cdf(residual, rng.uniform());
}

}  // namespace detail

/// x' ~ p_x; keep y' = x' with probability min(1, p_y(x') / p_x(x')), otherwise
/// draw y' from the normalized residual max(0, p_y - p_x). P(x' = y') = 1 - TV.
inline std::pair<std::size_t, std::size_t> maximal_independent_couple(std::span<const double> px,
                                                                      std::span<const double> py, DrawStream& rng) {
  detail::check_normalized(px);
  detail::check_normalized(py);
  if (px.size() != py.size()) throw InvalidArgument("distributions have different supports");
  const std::size_t x_prime = detail::inverse_cdf(px, rng.uniform());
  return {x_prime, detail::maximal_partner(x_prime, px, py, rng)};
}

/// Maximal coupling of the rows q(. | x) and q(. | y) of a matrix proposal.
struct MaximalIndependentCoupling {
  using move_type = std::size_t;

  MatrixProposal proposal;

  [[nodiscard]] std::pair<std::size_t, std::size_t> sample_pair(std::size_t x, std::size_t y,
                                                                const StepDraws& d) const {
    DrawStream pr = d.proposal();
    const std::size_t x_prime = proposal.propose(x, pr);
    if (x == y) return {x_prime, x_prime};
    DrawStream cr = d.coupling();
    return {x_prime, detail::maximal_partner(x_prime, proposal.row(x), proposal.row(y), cr)};
  }
};

// ---------------------------------------------------------------------------
// Ising heat-bath couplings

/// Same (site, spin) for both lattices. With a shared acceptance uniform this
/// is a monotone coupling for θ > 0.
inline std::pair<SpinProposal, SpinProposal> ising_heatbath_coupled_proposal(const IsingLattice& x,
                                                                             const IsingLattice& y, DrawStream& rng) {
  if (x.num_sites() != y.num_sites()) throw InvalidArgument("lattices differ in size");
  const SpinProposal m = IsingHeatBathProposal::propose(x, rng);
  return {m, m};
}

struct IsingMonotoneCoupling {
  using move_type = SpinProposal;

  [[nodiscard]] std::pair<SpinProposal, SpinProposal> sample_pair(const IsingLattice& x, const IsingLattice& y,
                                                                  const StepDraws& d) const {
    DrawStream pr = d.proposal();
    return ising_heatbath_coupled_proposal(x, y, pr);
  }
};

/// Independent proposals for distinct lattices; identical ones when equal so
/// the coupling stays sticky.
struct IsingIndependentCoupling {
  using move_type = SpinProposal;

  [[nodiscard]] std::pair<SpinProposal, SpinProposal> sample_pair(const IsingLattice& x, const IsingLattice& y,
                                                                  const StepDraws& d) const {
    DrawStream pr = d.proposal();
    const SpinProposal mx = IsingHeatBathProposal::propose(x, pr);
    if (x == y) return {mx, mx};
    DrawStream ar = d.alt_proposal();
    return {mx, IsingHeatBathProposal::propose(y, ar)};
  }
};

}  // namespace dmh
