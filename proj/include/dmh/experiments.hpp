#pragma once

// Named reproduction experiments. Each one is a pure function of its config
// (seed included) and returns a numeric table that the CLI writes as CSV.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "dmh/error.hpp"
#include "dmh/objectives.hpp"
#include "dmh/oracles.hpp"
#include "dmh/random.hpp"

namespace dmh::experiments {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Header row, then comma-separated rows, values at 17 significant digits.
  [[nodiscard]] std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out += ',';
      out += header[i];
    }
    out += '\n';
    char buf[40];
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        out += buf;
      }
      out += '\n';
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open output file: " + path);
    f << to_csv();
    if (!f) throw InvalidArgument("failed writing output file: " + path);
  }
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::size_t chain_length = 1000;
  std::vector<std::size_t> chain_lengths;  // variance-compare only
  std::size_t reps = 1;
  double grid_start = 0.0;
  double grid_stop = 1.0;
  std::size_t grid_points = 1;
  std::size_t burn_in = 0;
  std::size_t workers = 1;
  OptimizerConfig optimizer{};
  double theta0 = 0.0;  // starting h or T for the optimize commands
  std::size_t lattice = 12;
  double coupling = 1.0;
  bool coupled = true;
  double observation = 0.4;  // variance-compare
  std::string out;

  void validate() const {
    if (chain_length == 0) throw InvalidArgument("chain_length must be positive");
    if (reps == 0) throw InvalidArgument("reps must be positive");
    if (grid_points == 0) throw InvalidArgument("grid_points must be positive");
    if (grid_points > 1 && !(grid_stop > grid_start)) throw InvalidArgument("grid must be increasing");
    if (workers == 0) throw InvalidArgument("workers must be positive");
    if (lattice < 2) throw InvalidArgument("lattice must be at least 2");
    if (!(coupling > 0.0)) throw InvalidArgument("theta must be positive");
    for (std::size_t i = 0; i < chain_lengths.size(); ++i) {
      if (chain_lengths[i] == 0) throw InvalidArgument("chain_lengths entries must be positive");
      if (i && chain_lengths[i] <= chain_lengths[i - 1]) throw InvalidArgument("chain_lengths must increase");
    }
    optimizer.validate();
  }

  [[nodiscard]] std::vector<double> grid() const {
    std::vector<double> g(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
      g[i] = grid_points == 1 ? grid_start
                              : grid_start + (grid_stop - grid_start) * static_cast<double>(i) /
                                                 static_cast<double>(grid_points - 1);
    return g;
  }

  [[nodiscard]] MixtureRunConfig mixture() const {
    MixtureRunConfig m;
    m.chain_length = chain_length;
    m.reps = reps;
    m.workers = workers;
    m.burn_in = burn_in;
    return m;
  }

  [[nodiscard]] IsingRunConfig ising() const {
    IsingRunConfig c;
    c.lattice = lattice;
    c.coupling = coupling;
    c.sweeps = chain_length;
    c.burn_in_sweeps = burn_in;
    c.reps = reps;
    c.workers = workers;
    c.coupled = coupled;
    return c;
  }
};

inline constexpr std::string_view kExperiments[] = {"mixture-sweep", "mixture-optimize", "ising-sweep",
                                                    "ising-optimize", "variance-compare"};

/// Desk-scale defaults per experiment.
inline ExperimentConfig default_config(std::string_view experiment) {
  ExperimentConfig c;
  c.experiment = std::string(experiment);
  if (experiment == "mixture-sweep") {
    c.chain_length = 10000;
    c.reps = 100;
    c.grid_start = -6.0;
    c.grid_stop = 9.0;
    c.grid_points = 61;
  } else if (experiment == "mixture-optimize") {
    c.chain_length = 2000;
    c.reps = 10;
    c.theta0 = 4.0;
    c.optimizer.iterations = 200;
    c.optimizer.learning_rate = 0.05;
  } else if (experiment == "ising-sweep") {
    c.chain_length = 10000;
    c.reps = 4;
    c.grid_start = 1.5;
    c.grid_stop = 3.2;
    c.grid_points = 20;
  } else if (experiment == "ising-optimize") {
    c.chain_length = 4000;
    c.reps = 1;
    c.theta0 = 1.8;
    c.optimizer.iterations = 300;
    c.optimizer.learning_rate = 0.01;
    c.optimizer.lower_bound = 0.5;
    c.optimizer.upper_bound = 10.0;
  } else if (experiment == "variance-compare") {
    c.chain_lengths = {100, 1000, 10000};
    c.reps = 200;
    c.observation = 0.4;
  } else {
    throw InvalidArgument("unknown experiment: " + std::string(experiment));
  }
  return c;
}

// ---------------------------------------------------------------------------

inline Table mixture_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.seed);
  const auto mcfg = cfg.mixture();
  Table t{{"h", "p1", "p2", "p3", "entropy_est", "grad_est", "entropy_exact", "grad_exact_fd"}, {}};
  const auto grid = cfg.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = grid[i];
    const ProbVector pv = estimate_mixture_posterior(h, mcfg, root.substream(i));
    const auto est = entropy_and_gradient(pv);
    const double exact_fd =
        oracle::finite_difference([&](double x) { return oracle::posterior_entropy(x, mcfg.model); }, h, 1e-5);
    t.rows.push_back({h, pv.p[0], pv.p[1], pv.p[2], est.value, est.grad, oracle::posterior_entropy(h, mcfg.model),
                      exact_fd});
  }
  return t;
}

inline OptimizerTrace mixture_optimize_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.seed);
  const auto mcfg = cfg.mixture();
  const StochasticObjective objective = [&](double h, std::size_t it) {
    return entropy_and_gradient(estimate_mixture_posterior(h, mcfg, root.substream(it)));
  };
  return gradient_ascent(objective, cfg.optimizer, cfg.theta0);
}

namespace detail {

inline Table trace_table(const OptimizerTrace& trace, std::vector<std::string> header) {
  Table t{std::move(header), {}};
  for (const auto& s : trace.steps)
    t.rows.push_back({static_cast<double>(s.iteration), s.theta, s.value, s.grad});
  return t;
}

}  // namespace detail

inline Table mixture_optimize(const ExperimentConfig& cfg) {
  const auto trace = mixture_optimize_trace(cfg);
  if (trace.aborted) throw InvalidState(trace.message);
  return detail::trace_table(trace, {"iter", "h", "entropy_est", "grad_est"});
}

inline std::vector<HeatCapacityEstimate> ising_sweep_estimates(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.seed);
  const auto icfg = cfg.ising();
  std::vector<HeatCapacityEstimate> out;
  const auto grid = cfg.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(estimate_heat_capacity(grid[i], icfg, root.substream(i)));
  return out;
}

inline Table ising_sweep(const ExperimentConfig& cfg) {
  Table t{{"T", "mean_energy", "C", "dC_dT"}, {}};
  for (const auto& e : ising_sweep_estimates(cfg)) t.rows.push_back({e.temperature, e.mean_energy, e.heat_capacity, e.dC_dT});
  return t;
}

/// Location of the maximum of y over an increasing grid x. A parabola through
/// the maximum and its two neighbors refines the grid point; the result stays
/// within the neighboring grid points.
inline double peak_location(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size()) throw InvalidArgument("peak_location needs matching non-empty vectors");
  const auto i = static_cast<std::size_t>(std::distance(y.begin(), std::max_element(y.begin(), y.end())));
  if (i == 0 || i + 1 == x.size()) return x[i];
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
  if (!(a < 0.0)) return x1;
  return std::clamp(-b / (2.0 * a), x0, x2);
}

inline OptimizerTrace ising_optimize_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.seed);
  const auto icfg = cfg.ising();
  const StochasticObjective objective = [&](double T, std::size_t it) {
    const auto e = estimate_heat_capacity(T, icfg, root.substream(it));
    return ValueAndGradient{e.heat_capacity, e.dC_dT};
  };
  return gradient_ascent(objective, cfg.optimizer, cfg.theta0);
}

inline Table ising_optimize(const ExperimentConfig& cfg) {
  const auto trace = ising_optimize_trace(cfg);
  if (trace.aborted) throw InvalidState(trace.message);
  return detail::trace_table(trace, {"iter", "T", "C_est", "dC_est"});
}

struct VarianceRow {
  std::size_t chain_length = 0;
  double mean_dmh = 0.0;
  double var_dmh = 0.0;
  double mean_score = 0.0;
  double var_score = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_and_variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0};
}

}  // namespace detail

/// Replicated entropy-gradient estimates from dmh_run and score_run at the
/// configured observation, one row per chain length.
inline std::vector<VarianceRow> variance_rows(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.chain_lengths.empty()) throw InvalidArgument("variance-compare needs chain_lengths");
  const RandomStream root(cfg.seed);
  std::vector<VarianceRow> rows;
  for (std::size_t i = 0; i < cfg.chain_lengths.size(); ++i) {
    auto mcfg = cfg.mixture();
    mcfg.chain_length = cfg.chain_lengths[i];
    std::vector<double> g_dmh;
    std::vector<double> g_score;
    for (const auto& pv : mixture_posterior_replicates(cfg.observation, mcfg, root.substream(2 * i)))
      g_dmh.push_back(entropy_and_gradient(pv).grad);
    for (const auto& pv : mixture_score_replicates(cfg.observation, mcfg, root.substream(2 * i + 1)))
      g_score.push_back(entropy_and_gradient(pv, 0.02, false).grad);
    VarianceRow row;
    row.chain_length = cfg.chain_lengths[i];
    std::tie(row.mean_dmh, row.var_dmh) = detail::mean_and_variance(g_dmh);
    std::tie(row.mean_score, row.var_score) = detail::mean_and_variance(g_score);
    rows.push_back(row);
  }
  return rows;
}

inline Table variance_compare(const ExperimentConfig& cfg) {
  Table t{{"T", "var_dmh", "var_score"}, {}};
  for (const auto& r : variance_rows(cfg)) t.rows.push_back({static_cast<double>(r.chain_length), r.var_dmh, r.var_score});
  return t;
}

inline Table run(const ExperimentConfig& cfg) {
  const std::string_view e = cfg.experiment;
  if (e == "mixture-sweep") return mixture_sweep(cfg);
  if (e == "mixture-optimize") return mixture_optimize(cfg);
  if (e == "ising-sweep") return ising_sweep(cfg);
  if (e == "ising-optimize") return ising_optimize(cfg);
  if (e == "variance-compare") return variance_compare(cfg);
  throw InvalidArgument("unknown experiment: " + cfg.experiment);
}

}  // namespace dmh::experiments
