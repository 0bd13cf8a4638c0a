#pragma once

// Marginal proposal kernels q(x' | x).
//
// A proposal produces a *move*, applies it to a state in place, and reports
// log q(x | x') - log q(x' | x). For most kernels the move is simply the
// proposed state; the Ising heat-bath move is a (site, spin) pair so that the
// acceptance ratio can be computed from the four incident bonds.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "dmh/error.hpp"
#include "dmh/random.hpp"
#include "dmh/targets/ising.hpp"

namespace dmh {

template <class P, class State>
concept Proposal = requires(const P& p, const State& x, State& xm, DrawStream& r, const typename P::move_type& m) {
  { p.propose(x, r) } -> std::same_as<typename P::move_type>;
  { p.log_correction(x, m) } -> std::convertible_to<double>;
  p.apply(xm, m);
};

struct GaussianRandomWalk {
  using move_type = double;

  double sigma = 1.0;

  [[nodiscard]] double propose(double x, DrawStream& r) const { return x + sigma * r.normal(); }
  [[nodiscard]] static constexpr double log_correction(double, double) { return 0.0; }
  static void apply(double& x, double proposed) { x = proposed; }

  [[nodiscard]] double log_density(double x_prime, double x) const {
    const double z = (x_prime - x) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
};

namespace detail {

inline std::size_t inverse_cdf(std::span<const double> p, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // u landed in the rounding slack above the last cumulative sum
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) return i;
  return p.size() - 1;
}

inline void check_normalized(std::span<const double> p, double tol = 1e-12) {
  if (p.empty()) throw InvalidArgument("empty distribution");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw InvalidArgument("negative or NaN probability");
    s += v;
  }
  if (std::abs(s - 1.0) > tol) throw InvalidArgument("distribution does not sum to 1");
}

}  // namespace detail

/// Proposal on states {0, ..., n-1} given by a row-stochastic matrix.
class MatrixProposal {
 public:
  using move_type = std::size_t;

  explicit MatrixProposal(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
    for (const auto& r : rows_) {
      if (r.size() != rows_.size()) throw InvalidArgument("proposal matrix must be square");
      detail::check_normalized(r);
    }
  }

  /// State-independent uniform proposal.
  static MatrixProposal uniform(std::size_t n) {
    return MatrixProposal(std::vector<std::vector<double>>(n, std::vector<double>(n, 1.0 / static_cast<double>(n))));
  }

  /// Deterministic 0 <-> 1 swap.
  static MatrixProposal swap() { return MatrixProposal({{0.0, 1.0}, {1.0, 0.0}}); }

  [[nodiscard]] std::size_t num_states() const { return rows_.size(); }
  [[nodiscard]] std::span<const double> row(std::size_t x) const { return rows_.at(x); }
  [[nodiscard]] double prob(std::size_t x, std::size_t x_prime) const { return rows_[x][x_prime]; }

  [[nodiscard]] std::size_t propose(std::size_t x, DrawStream& r) const { return detail::inverse_cdf(row(x), r.uniform()); }
  [[nodiscard]] double log_correction(std::size_t x, std::size_t x_prime) const {
    return std::log(rows_[x_prime][x]) - std::log(rows_[x][x_prime]);
  }
  static void apply(std::size_t& x, std::size_t proposed) { x = proposed; }

 private:
  std::vector<std::vector<double>> rows_;
};

/// Pick a site uniformly and propose spin +1 or -1 with equal probability.
struct IsingHeatBathProposal {
  using move_type = SpinProposal;

  [[nodiscard]] static SpinProposal propose(const IsingLattice& x, DrawStream& r) {
    const auto site = static_cast<std::uint32_t>(r.below(x.num_sites()));
    const std::int8_t spin = r.uniform() < 0.5 ? -1 : 1;
    return {site, spin};
  }
  [[nodiscard]] static constexpr double log_correction(const IsingLattice&, const SpinProposal&) { return 0.0; }
  static void apply(IsingLattice& x, const SpinProposal& m) { x.set(m.site, m.spin); }
};

}  // namespace dmh
