#pragma once

// Scalar objectives assembled from estimated expectations and their
// derivatives, the chain drivers that produce those estimates for the mixture
// and Ising models, and a gradient-ascent loop.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dmh/couplings.hpp"
#include "dmh/error.hpp"
#include "dmh/parallel.hpp"
#include "dmh/proposals.hpp"
#include "dmh/random.hpp"
#include "dmh/samplers.hpp"
#include "dmh/targets/ising.hpp"
#include "dmh/targets/mixture.hpp"

namespace dmh {

/// Probabilities and their parameter derivatives.
struct ProbVector {
  std::vector<double> p;
  std::vector<double> dp;

  /// Throws unless p is a distribution and (optionally) dp sums to 0, both
  /// within tol. Score-function estimates of dp only sum to 0 in expectation.
  void validate(double tol, bool check_derivative_sum = true) const {
    if (p.size() != dp.size()) throw InvalidArgument("p and dp differ in length");
    double sp = 0.0;
    double sdp = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < -tol) throw InvalidArgument("negative probability in ProbVector");
      sp += p[i];
      sdp += dp[i];
    }
    if (std::abs(sp - 1.0) > tol) throw InvalidArgument("probabilities do not sum to 1");
    if (check_derivative_sum && std::abs(sdp) > tol) throw InvalidArgument("probability derivatives do not sum to 0");
  }
};

struct ValueAndGradient {
  double value = 0.0;
  double grad = 0.0;
};

/// H = -Σ p ln p and dH = -Σ (1 + ln p) dp; components with p <= 0 are skipped.
inline ValueAndGradient entropy_and_gradient(const ProbVector& pv, double tol = 0.02,
                                             bool check_derivative_sum = true) {
  pv.validate(tol, check_derivative_sum);
  ValueAndGradient out;
  for (std::size_t j = 0; j < pv.p.size(); ++j) {
    if (pv.p[j] <= 0.0) continue;
    const double lp = std::log(pv.p[j]);
    out.value -= pv.p[j] * lp;
    out.grad -= (1.0 + lp) * pv.dp[j];
  }
  return out;
}

/// First two moments of the energy and their total temperature derivatives.
struct MomentPair {
  double m1 = 0.0;
  double m2 = 0.0;
  double dm1 = 0.0;
  double dm2 = 0.0;
  double temperature = 1.0;
};

/// C = Var(H) / T² (k_B = 1) and its temperature derivative.
inline ValueAndGradient heat_capacity_and_gradient(const MomentPair& mp) {
  const double T = mp.temperature;
  if (!(T > 0.0)) throw InvalidArgument("temperature must be positive");
  const double var = mp.m2 - mp.m1 * mp.m1;
  const double dvar = mp.dm2 - 2.0 * mp.m1 * mp.dm1;
  return {var / (T * T), dvar / (T * T) - 2.0 * var / (T * T * T)};
}

// ---------------------------------------------------------------------------
// Mixture posterior

struct MixtureRunConfig {
  MixtureModel model{};
  std::size_t chain_length = 10000;
  std::size_t reps = 20;
  std::size_t workers = 1;
  std::size_t burn_in = 0;
  std::size_t start_state = 0;
};

inline auto mixture_indicators() {
  return [](std::size_t j) {
    std::array<double, 3> v{};
    v[j] = 1.0;
    return v;
  };
}

/// One ProbVector per replication: primal averages and dmh derivatives of the
/// three component indicators under the maximal independent coupling of a
/// uniform proposal.
inline std::vector<ProbVector> mixture_posterior_replicates(double h, const MixtureRunConfig& cfg,
                                                           const RandomStream& root) {
  const MixtureTarget target{cfg.model, h};
  const auto proposal = MatrixProposal::uniform(MixtureTarget::num_states());
  const MaximalIndependentCoupling coupling{proposal};
  RunOptions opts;
  opts.burn_in = cfg.burn_in;
  return replicate(cfg.reps, cfg.workers, [&](std::size_t r) {
    const auto rep = dmh_run(target, proposal, coupling, mixture_indicators(), cfg.start_state, cfg.chain_length,
                             root.substream(r), opts);
    return ProbVector{rep.primal_avg, rep.deriv_est};
  });
}

inline ProbVector average(const std::vector<ProbVector>& reps) {
  if (reps.empty()) throw InvalidArgument("no replications to average");
  ProbVector out{std::vector<double>(reps.front().p.size(), 0.0), std::vector<double>(reps.front().p.size(), 0.0)};
  for (const auto& r : reps) {
    for (std::size_t j = 0; j < out.p.size(); ++j) {
      out.p[j] += r.p[j];
      out.dp[j] += r.dp[j];
    }
  }
  const auto n = static_cast<double>(reps.size());
  for (std::size_t j = 0; j < out.p.size(); ++j) {
    out.p[j] /= n;
    out.dp[j] /= n;
  }
  return out;
}

/// Score-function counterpart of mixture_posterior_replicates.
inline std::vector<ProbVector> mixture_score_replicates(double h, const MixtureRunConfig& cfg,
                                                        const RandomStream& root,
                                                        ScoreVariant variant = ScoreVariant::realized_transition) {
  const MixtureTarget target{cfg.model, h};
  const auto proposal = MatrixProposal::uniform(MixtureTarget::num_states());
  RunOptions opts;
  opts.burn_in = cfg.burn_in;
  return replicate(cfg.reps, cfg.workers, [&](std::size_t r) {
    const auto rep = score_run(target, proposal, mixture_indicators(), cfg.start_state, cfg.chain_length,
                               root.substream(r), opts, variant);
    return ProbVector{rep.primal_avg, rep.deriv_est};
  });
}

inline ProbVector estimate_mixture_posterior(double h, const MixtureRunConfig& cfg, const RandomStream& root) {
  if (cfg.chain_length == 0 || cfg.reps == 0) throw InvalidArgument("chain length and reps must be positive");
  return average(mixture_posterior_replicates(h, cfg, root));
}

// ---------------------------------------------------------------------------
// Ising heat capacity

struct IsingRunConfig {
  std::size_t lattice = 12;
  double coupling = 1.0;
  std::size_t sweeps = 1000;  // records, one per L² heat-bath steps
  std::size_t burn_in_sweeps = 0;
  std::size_t reps = 1;
  std::size_t workers = 1;
  bool coupled = true;
};

/// Energy moments (H, H²) and their temperature derivatives from one dmh chain
/// started from the all-up lattice.
inline MomentPair ising_moments(double temperature, const IsingRunConfig& cfg, const RandomStream& stream) {
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  const IsingTarget target{cfg.coupling, temperature};
  const IsingHeatBathProposal proposal;
  const auto energy_moments = [&](const IsingLattice& x) {
    const double h = target.energy(x);
    return std::array<double, 2>{h, h * h};
  };
  RunOptions opts;
  const std::size_t sites = cfg.lattice * cfg.lattice;
  opts.record_every = sites;
  opts.burn_in = cfg.burn_in_sweeps * sites;
  opts.check_stickiness = false;
  const IsingLattice start(cfg.lattice, 1);
  const EstimateReport rep =
      cfg.coupled
          ? dmh_run(target, proposal, IsingMonotoneCoupling{}, energy_moments, start, cfg.sweeps, stream, opts)
          : dmh_run(target, proposal, IsingIndependentCoupling{}, energy_moments, start, cfg.sweeps, stream, opts);
  return {rep.primal_avg[0], rep.primal_avg[1], rep.deriv_est[0], rep.deriv_est[1], temperature};
}

struct HeatCapacityEstimate {
  double temperature = 0.0;
  double mean_energy = 0.0;
  double mean_energy_se = 0.0;
  double heat_capacity = 0.0;
  double heat_capacity_se = 0.0;
  double dC_dT = 0.0;
  double dC_dT_se = 0.0;
  std::vector<ValueAndGradient> replicates;
};

namespace detail {

// mean and its standard error
inline std::pair<double, double> mean_and_se(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

/// Plug-in heat capacity and gradient per replication, then averaged.
inline HeatCapacityEstimate estimate_heat_capacity(double temperature, const IsingRunConfig& cfg,
                                                   const RandomStream& root) {
  if (cfg.reps == 0 || cfg.sweeps == 0) throw InvalidArgument("sweeps and reps must be positive");
  const auto moments = replicate(cfg.reps, cfg.workers,
                                 [&](std::size_t r) { return ising_moments(temperature, cfg, root.substream(r)); });
  HeatCapacityEstimate out;
  out.temperature = temperature;
  std::vector<double> energy;
  std::vector<double> c;
  std::vector<double> dc;
  for (const auto& mp : moments) {
    const auto hc = heat_capacity_and_gradient(mp);
    out.replicates.push_back(hc);
    energy.push_back(mp.m1);
    c.push_back(hc.value);
    dc.push_back(hc.grad);
  }
  std::tie(out.mean_energy, out.mean_energy_se) = detail::mean_and_se(energy);
  std::tie(out.heat_capacity, out.heat_capacity_se) = detail::mean_and_se(c);
  std::tie(out.dC_dT, out.dC_dT_se) = detail::mean_and_se(dc);
  return out;
}

// ---------------------------------------------------------------------------
// Gradient ascent

enum class OptimizerAlgorithm { sgd, adam };

struct OptimizerConfig {
  OptimizerAlgorithm algorithm = OptimizerAlgorithm::adam;
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t iterations = 100;
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw InvalidArgument("Adam betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw InvalidArgument("Adam epsilon must be positive");
    if (!(lower_bound < upper_bound)) throw InvalidArgument("empty parameter bounds");
  }
};

struct OptimizerStep {
  std::size_t iteration = 0;
  double theta = 0.0;
  double value = 0.0;
  double grad = 0.0;
};

struct OptimizerTrace {
  std::vector<OptimizerStep> steps;
  bool aborted = false;
  std::string message;
};

/// Objective evaluated at (θ, iteration); the iteration index lets stochastic
/// objectives pick a fresh substream per call.
using StochasticObjective = std::function<ValueAndGradient(double theta, std::size_t iteration)>;

/// Row 0 evaluates θ0; each of `iterations` updates moves θ uphill and
/// evaluates again.
inline OptimizerTrace gradient_ascent(const StochasticObjective& objective, const OptimizerConfig& config,
                                      double theta0) {
  config.validate();
  OptimizerTrace trace;
  double theta = theta0;
  double m = 0.0;
  double v = 0.0;

  auto evaluate = [&](std::size_t it) {
    const auto r = objective(theta, it);
    trace.steps.push_back({it, theta, r.value, r.grad});
    if (!std::isfinite(r.grad)) {
      std::ostringstream msg;
      msg << "non-finite gradient at iteration " << it << ", theta = " << theta;
      trace.aborted = true;
      trace.message = msg.str();
      return false;
    }
    return true;
  };

  if (!evaluate(0)) return trace;
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    const double g = trace.steps.back().grad;
    double step = 0.0;
    switch (config.algorithm) {
      case OptimizerAlgorithm::sgd:
        step = config.learning_rate * g;
        break;
      case OptimizerAlgorithm::adam: {
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g * g;
        const double mhat = m / (1.0 - std::pow(config.beta1, static_cast<double>(it)));
        const double vhat = v / (1.0 - std::pow(config.beta2, static_cast<double>(it)));
        step = config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
        break;
      }
    }
    theta = std::clamp(theta + step, config.lower_bound, config.upper_bound);
    if (!evaluate(it)) break;
  }
  return trace;
}

}  // namespace dmh
