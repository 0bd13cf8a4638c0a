#pragma once

// Exact reference computations. Nothing here runs a chain: posteriors come
// from enumeration, finite-length chain expectations from powers of the exact
// transition matrix, and Ising moments from summing over every configuration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "dmh/error.hpp"
#include "dmh/objectives.hpp"
#include "dmh/targets/ising.hpp"
#include "dmh/targets/mixture.hpp"

namespace dmh::oracle {

/// Normalized P(J | H = h) with analytic h-derivatives.
inline ProbVector enumerate_posterior(double h, const MixtureModel& model = {}) {
  const std::size_t n = model.means.size();
  const double s2 = model.sigma * model.sigma;
  std::vector<double> logw(n);
  std::vector<double> dlogw(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = h - model.means[j];
    logw[j] = -r * r / (2.0 * s2);
    dlogw[j] = -r / s2;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double lw : logw) z += std::exp(lw - top);
  ProbVector out{std::vector<double>(n), std::vector<double>(n)};
  double mean_dlogw = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out.p[j] = std::exp(logw[j] - top) / z;
    mean_dlogw += out.p[j] * dlogw[j];
  }
  for (std::size_t j = 0; j < n; ++j) out.dp[j] = out.p[j] * (dlogw[j] - mean_dlogw);
  return out;
}

inline double posterior_entropy(double h, const MixtureModel& model = {}) {
  const auto pv = enumerate_posterior(h, model);
  double H = 0.0;
  for (double p : pv.p)
    if (p > 0.0) H -= p * std::log(p);
  return H;
}

inline double posterior_entropy_gradient(double h, const MixtureModel& model = {}) {
  const auto pv = enumerate_posterior(h, model);
  double g = 0.0;
  for (std::size_t j = 0; j < pv.p.size(); ++j)
    if (pv.p[j] > 0.0) g -= (1.0 + std::log(pv.p[j])) * pv.dp[j];
  return g;
}

/// Observation maximizing the exact posterior entropy, searched between the
/// smallest and largest component means.
inline double entropy_argmax(const MixtureModel& model = {}) {
  const auto [lo, hi] = std::minmax_element(model.means.begin(), model.means.end());
  const auto r = boost::math::tools::brent_find_minima([&](double h) { return -posterior_entropy(h, model); }, *lo,
                                                       *hi, std::numeric_limits<double>::digits / 2);
  return r.first;
}

inline double finite_difference(const std::function<double(double)>& fn, double theta, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  return (fn(theta + eps) - fn(theta - eps)) / (2.0 * eps);
}

/// Small MH chain on {0, ..., n-1}: θ-dependent log-weights, a proposal matrix,
/// a start state and a length.
struct DiscreteChainSpec {
  std::function<std::vector<double>(double theta)> log_weights;
  std::vector<std::vector<double>> proposal;
  std::size_t start = 0;
  std::size_t length = 1;
};

/// Exact MH transition matrix at θ.
inline std::vector<std::vector<double>> transition_matrix(const DiscreteChainSpec& spec, double theta) {
  const auto lw = spec.log_weights(theta);
  const std::size_t n = lw.size();
  if (n == 0 || n > 64) throw InvalidArgument("transition-matrix oracle supports 1..64 states");
  if (spec.proposal.size() != n) throw InvalidArgument("proposal matrix size mismatch");
  for (const auto& row : spec.proposal) {
    if (row.size() != n) throw InvalidArgument("proposal matrix must be square");
    double s = 0.0;
    for (double q : row) s += q;
    if (std::abs(s - 1.0) > 1e-12) throw InvalidArgument("proposal rows must sum to 1");
  }
  std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    double off = 0.0;
    for (std::size_t xp = 0; xp < n; ++xp) {
      if (xp == x || spec.proposal[x][xp] == 0.0) continue;
      const double ratio = std::exp(lw[xp] - lw[x]) * spec.proposal[xp][x] / spec.proposal[x][xp];
      P[x][xp] = spec.proposal[x][xp] * std::min(1.0, ratio);
      off += P[x][xp];
    }
    P[x][x] = 1.0 - off;
  }
  for (const auto& row : P) {
    double s = 0.0;
    for (double p : row) s += p;
    if (std::abs(s - 1.0) > 1e-10) throw InvalidState("transition matrix is not row-stochastic");
  }
  return P;
}

/// E[(1/T) Σ_{t=1..T} f(Z_t)] with Z_1 = start.
inline double finite_T_expectation(const DiscreteChainSpec& spec, const std::vector<double>& f, double theta) {
  if (spec.length == 0) throw InvalidArgument("chain length must be at least 1");
  const auto P = transition_matrix(spec, theta);
  const std::size_t n = P.size();
  if (f.size() != n) throw InvalidArgument("test function has wrong length");
  std::vector<double> dist(n, 0.0);
  dist.at(spec.start) = 1.0;
  double total = 0.0;
  for (std::size_t t = 0; t < spec.length; ++t) {
    if (t > 0) {
      std::vector<double> next(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) next[j] += dist[i] * P[i][j];
      dist = std::move(next);
    }
    for (std::size_t i = 0; i < n; ++i) total += dist[i] * f[i];
  }
  return total / static_cast<double>(spec.length);
}

struct IsingExact {
  double mean_energy = 0.0;
  double mean_energy_sq = 0.0;
  double heat_capacity = 0.0;
  double dC_dT = 0.0;
};

/// Exact Boltzmann moments by summing over all 2^(L²) configurations, L ≤ 4.
inline IsingExact ising_exhaustive_heat_capacity(std::size_t L, double theta, double T) {
  if (L < 2 || L > 4) throw InvalidArgument("exhaustive Ising oracle supports 2 <= L <= 4");
  if (!(T > 0.0)) throw InvalidArgument("temperature must be positive");
  const std::size_t sites = L * L;
  const std::size_t count = std::size_t{1} << sites;

  // literal double sum on each configuration
  std::vector<double> energies(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    auto spin = [&](std::size_t j, std::size_t k) -> int {
      return ((bits >> ((j % L) * L + (k % L))) & 1U) ? 1 : -1;
    };
    long s = 0;
    for (std::size_t j = 0; j < L; ++j)
      for (std::size_t k = 0; k < L; ++k) s += spin(j, k) * spin(j, k + 1) + spin(j + 1, k) * spin(j, k);
    energies[bits] = -theta * static_cast<double>(s);
  }
  const double emin = *std::min_element(energies.begin(), energies.end());
  double z = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  for (double e : energies) {
    const double w = std::exp(-(e - emin) / T);
    z += w;
    s1 += w * e;
    s2 += w * e * e;
    s3 += w * e * e * e;
  }
  const double m1 = s1 / z;
  const double m2 = s2 / z;
  const double m3 = s3 / z;
  // d<g>/dT = (<gH> - <g><H>) / T²
  const double dm1 = (m2 - m1 * m1) / (T * T);
  const double dm2 = (m3 - m2 * m1) / (T * T);
  const double var = m2 - m1 * m1;
  IsingExact out;
  out.mean_energy = m1;
  out.mean_energy_sq = m2;
  out.heat_capacity = var / (T * T);
  out.dC_dT = (dm2 - 2.0 * m1 * dm1) / (T * T) - 2.0 * var / (T * T * T);
  return out;
}

}  // namespace dmh::oracle
