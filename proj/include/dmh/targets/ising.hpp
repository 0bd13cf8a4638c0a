#pragma once

// Two-dimensional isotropic Ising model on an L x L periodic lattice.
//
// H(x, θ) = -θ Σ_{j,k} (x[j][k] x[j][k+1] + x[j+1][k] x[j][k]), indices mod L,
// i.e. the literal 2L² term sum. For L = 2 the wrap-around terms repeat
// neighbor pairs; they are kept as written.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "dmh/dual.hpp"
#include "dmh/error.hpp"
#include "dmh/random.hpp"

namespace dmh {

/// Proposal to set one site to a given spin.
struct SpinProposal {
  std::uint32_t site = 0;
  std::int8_t spin = 1;

  friend constexpr bool operator==(const SpinProposal&, const SpinProposal&) = default;
};

class IsingLattice {
 public:
  IsingLattice() = default;

  explicit IsingLattice(std::size_t side, std::int8_t fill = 1) : side_(side), spins_(side * side, fill) {
    if (side < 2) throw InvalidArgument("Ising lattice side must be at least 2");
    if (fill != 1 && fill != -1) throw InvalidArgument("spins must be +1 or -1");
    bond_sum_ = recount_bonds();
  }

  static IsingLattice checkerboard(std::size_t side) {
    IsingLattice x(side);
    for (std::size_t j = 0; j < side; ++j)
      for (std::size_t k = 0; k < side; ++k) x.spins_[j * side + k] = ((j + k) % 2 == 0) ? 1 : -1;
    x.bond_sum_ = x.recount_bonds();
    return x;
  }

  static IsingLattice random(std::size_t side, DrawStream& rng) {
    IsingLattice x(side);
    for (auto& s : x.spins_) s = rng.uniform() < 0.5 ? -1 : 1;
    x.bond_sum_ = x.recount_bonds();
    return x;
  }

  [[nodiscard]] std::size_t side() const { return side_; }
  [[nodiscard]] std::size_t num_sites() const { return spins_.size(); }
  [[nodiscard]] std::span<const std::int8_t> spins() const { return spins_; }

  [[nodiscard]] std::int8_t at(std::size_t j, std::size_t k) const { return spins_[(j % side_) * side_ + (k % side_)]; }
  [[nodiscard]] std::int8_t operator[](std::size_t site) const { return spins_[site]; }

  /// Sum of the four literal bond terms touching `site`, divided by its spin.
  [[nodiscard]] int neighbor_sum(std::size_t site) const {
    const std::size_t j = site / side_;
    const std::size_t k = site % side_;
    const std::size_t up = (j + side_ - 1) % side_;
    const std::size_t down = (j + 1) % side_;
    const std::size_t left = (k + side_ - 1) % side_;
    const std::size_t right = (k + 1) % side_;
    return spins_[j * side_ + right] + spins_[j * side_ + left] + spins_[down * side_ + k] + spins_[up * side_ + k];
  }

  /// Change in Σ bonds if `site` were set to `spin`.
  [[nodiscard]] int bond_delta(std::size_t site, std::int8_t spin) const {
    return (spin - spins_[site]) * neighbor_sum(site);
  }

  void set(std::size_t site, std::int8_t spin) {
    bond_sum_ += bond_delta(site, spin);
    spins_[site] = spin;
  }

  /// Σ of the literal bond terms, maintained incrementally. Energy is -θ times this.
  [[nodiscard]] long bond_sum() const { return bond_sum_; }

  /// Recount from scratch (literal double sum).
  [[nodiscard]] long recount_bonds() const {
    long s = 0;
    for (std::size_t j = 0; j < side_; ++j)
      for (std::size_t k = 0; k < side_; ++k) s += at(j, k) * at(j, k + 1) + at(j + 1, k) * at(j, k);
    return s;
  }

  /// Componentwise x ≥ y.
  [[nodiscard]] bool dominates(const IsingLattice& other) const {
    for (std::size_t i = 0; i < spins_.size(); ++i)
      if (spins_[i] < other.spins_[i]) return false;
    return true;
  }

  friend bool operator==(const IsingLattice& a, const IsingLattice& b) {
    return a.side_ == b.side_ && a.spins_ == b.spins_;
  }

  friend std::ostream& operator<<(std::ostream& os, const IsingLattice& x) {
    for (std::size_t j = 0; j < x.side_; ++j) {
      for (std::size_t k = 0; k < x.side_; ++k) os << (x.at(j, k) > 0 ? '+' : '-');
      if (j + 1 < x.side_) os << '/';
    }
    return os;
  }

 private:
  std::size_t side_ = 0;
  std::vector<std::int8_t> spins_;
  long bond_sum_ = 0;
};

inline double ising_hamiltonian(const IsingLattice& spins, double theta) {
  return -theta * static_cast<double>(spins.recount_bonds());
}

inline double ising_local_hamiltonian_delta(const IsingLattice& spins, std::size_t site, std::int8_t new_spin,
                                            double theta) {
  return -theta * static_cast<double>(spins.bond_delta(site, new_spin));
}

/// Onsager's infinite-lattice critical temperature, k_B = 1.
inline double critical_temperature(double theta) { return 2.0 * theta / std::log(1.0 + std::numbers::sqrt2); }

/// Boltzmann weight exp(-H / T) differentiated in the temperature T (k_B = 1).
struct IsingTarget {
  using state_type = IsingLattice;

  double coupling = 1.0;
  double temperature = 1.0;

  [[nodiscard]] double energy(const IsingLattice& x) const { return -coupling * static_cast<double>(x.bond_sum()); }

  [[nodiscard]] Dual log_density(const IsingLattice& x) const { return from_energy(energy(x)); }

  [[nodiscard]] Dual log_ratio(const IsingLattice& x, const SpinProposal& move) const {
    return from_energy(ising_local_hamiltonian_delta(x, move.site, move.spin, coupling));
  }

 private:
  [[nodiscard]] Dual from_energy(double h) const {
    return {-h / temperature, h / (temperature * temperature)};
  }
};

}  // namespace dmh
