#pragma once

// Metropolis-Hastings chains and their parameter derivatives.
//
//   mh_run     plain MH, returns ergodic averages of the test functions
//   dmh_run    MH plus one tracked alternative chain; returns unbiased
//              derivatives of the finite-length averages
//   score_run  score-function baseline accumulated over accept/reject steps
//
// Chain layout. With burn_in B and record interval k, the chain takes
// B + (T - 1) k transitions and evaluates the test functions at T records:
// after B steps and then every k steps. With B = 0 and k = 1 the first record
// is the start state and every state is recorded.
//
// Per transition the draws are addressed as (step, proposal), (step, coupling),
// (step, accept), (step, prune), so the primal path of dmh_run and score_run is
// bitwise identical to mh_run under the same stream.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "dmh/branch_weight.hpp"
#include "dmh/couplings.hpp"
#include "dmh/dual.hpp"
#include "dmh/error.hpp"
#include "dmh/proposals.hpp"
#include "dmh/random.hpp"
#include "dmh/targets/acceptance.hpp"

namespace dmh {

struct RunOptions {
  std::size_t burn_in = 0;
  std::size_t record_every = 1;
  bool trace_recoupling = false;
  /// Re-sample the coupling at x == y each step and fail on x' != y'.
  bool check_stickiness = true;
};

enum class BranchEnd { recoupled, replaced, end_of_chain };

/// Lifetime of one alternative branch, in transition indices.
struct BranchRecord {
  std::size_t branch_step = 0;
  std::size_t end_step = 0;
  BranchEnd end = BranchEnd::end_of_chain;

  [[nodiscard]] std::size_t duration() const { return end_step - branch_step; }
  friend bool operator==(const BranchRecord&, const BranchRecord&) = default;
};

struct EstimateReport {
  std::vector<double> primal_avg;
  std::vector<double> deriv_est;
  double acceptance_rate = 0.0;
  std::size_t records = 0;  // T
  std::size_t steps = 0;    // transitions taken
  std::vector<BranchRecord> recoupling;
};

enum class ScoreVariant {
  /// d log P(realized decision): log α on accept, log(1 - α) on reject.
  realized_transition,
  /// d log α(x_{i+1} | x_i) taken literally; zero on every rejection.
  literal,
};

namespace detail {

template <class R>
std::size_t value_count(const R& r) {
  if constexpr (std::is_arithmetic_v<R>) {
    return 1;
  } else {
    return std::size(r);
  }
}

template <class R>
double value_at(const R& r, std::size_t i) {
  if constexpr (std::is_arithmetic_v<R>) {
    return static_cast<double>(r);
  } else {
    return static_cast<double>(r[i]);
  }
}

template <class Tgt, class Prop, class State, class Move>
Dual move_acceptance(const Tgt& target, const Prop& proposal, const State& x, const Move& m) {
  Dual delta;
  if constexpr (requires { target.log_ratio(x, m); }) {
    delta = target.log_ratio(x, m);
    if (!isfinite(delta)) throw NonFiniteDensity("non-finite log-density ratio from state " + describe_state(x));
  } else if constexpr (std::same_as<Move, State>) {
    delta = checked_log_density(target, m) - checked_log_density(target, x);
  } else {
    State xp = x;
    proposal.apply(xp, m);
    delta = checked_log_density(target, xp) - checked_log_density(target, x);
  }
  delta += Dual::constant(proposal.log_correction(x, m));
  return acceptance_from_log_ratio(delta);
}

class Schedule {
 public:
  Schedule(std::size_t records, const RunOptions& opts) : burn_in_(opts.burn_in), every_(opts.record_every) {
    if (records == 0) throw InvalidArgument("chain length T must be at least 1");
    if (every_ == 0) throw InvalidArgument("record interval must be at least 1");
    total_ = burn_in_ + (records - 1) * every_;
  }
  [[nodiscard]] std::size_t total_steps() const { return total_; }
  [[nodiscard]] bool records_at(std::size_t step) const {
    return step >= burn_in_ && (step - burn_in_) % every_ == 0;
  }

 private:
  std::size_t burn_in_;
  std::size_t every_;
  std::size_t total_ = 0;
};

class Accumulator {
 public:
  template <class R>
  void add_primal(const R& fx) {
    resize(value_count(fx));
    for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += value_at(fx, i);
    ++records_;
  }
  template <class R>
  void add_branch(double w, const R& fy, const R& fx) {
    resize(value_count(fx));
    for (std::size_t i = 0; i < dsum_.size(); ++i) dsum_[i] += w * (value_at(fy, i) - value_at(fx, i));
  }
  template <class R>
  void add_score(double w, const R& fx) {
    resize(value_count(fx));
    for (std::size_t i = 0; i < dsum_.size(); ++i) dsum_[i] += w * value_at(fx, i);
  }

  void finish(EstimateReport& report) const {
    const auto n = static_cast<double>(records_);
    report.records = records_;
    report.primal_avg.resize(sum_.size());
    report.deriv_est.resize(dsum_.size());
    for (std::size_t i = 0; i < sum_.size(); ++i) report.primal_avg[i] = sum_[i] / n;
    for (std::size_t i = 0; i < dsum_.size(); ++i) report.deriv_est[i] = dsum_[i] / n;
  }

 private:
  void resize(std::size_t n) {
    if (sum_.empty()) {
      sum_.assign(n, 0.0);
      dsum_.assign(n, 0.0);
    }
  }
  std::vector<double> sum_;
  std::vector<double> dsum_;
  std::size_t records_ = 0;
};

}  // namespace detail

/// Plain Metropolis-Hastings. deriv_est is all zero.
template <DensityTarget Tgt, class Prop, class F>
  requires Proposal<Prop, typename Tgt::state_type>
EstimateReport mh_run(const Tgt& target, const Prop& proposal, F&& f, typename Tgt::state_type x1, std::size_t T,
                      const RandomStream& stream, const RunOptions& opts = {}) {
  const detail::Schedule schedule(T, opts);
  detail::Accumulator acc;
  auto x = std::move(x1);
  std::size_t accepted = 0;

  if (schedule.records_at(0)) acc.add_primal(f(x));
  for (std::size_t s = 1; s <= schedule.total_steps(); ++s) {
    const StepDraws d(stream, s);
    DrawStream pr = d.proposal();
    const auto m = proposal.propose(x, pr);
    const Dual alpha = detail::move_acceptance(target, proposal, x, m);
    DrawStream ar = d.accept();
    if (ar.uniform() <= alpha.value) {
      proposal.apply(x, m);
      ++accepted;
    }
    if (schedule.records_at(s)) acc.add_primal(f(x));
  }

  EstimateReport report;
  acc.finish(report);
  report.steps = schedule.total_steps();
  report.acceptance_rate = report.steps ? static_cast<double>(accepted) / static_cast<double>(report.steps) : 0.0;
  return report;
}

/// Differentiable Metropolis-Hastings.
///
/// Runs the primal chain together with at most one alternative chain that
/// branched off at an earlier accept/reject decision. Each primal decision
/// contributes a flip weight; pruning keeps the new alternative with
/// probability proportional to its weight, and an alternative that has
/// recoupled with the primal is dropped before pruning. At every record the
/// estimate accumulates w (f(y) - f(x)). The mean of deriv_est is the
/// derivative of E[(1/T) Σ f(x_t)] whenever `coupling` is a sticky coupling of
/// `proposal`.
template <DensityTarget Tgt, class Prop, class Coupling, class F>
  requires Proposal<Prop, typename Tgt::state_type> && CoupledProposal<Coupling, typename Tgt::state_type>
EstimateReport dmh_run(const Tgt& target, const Prop& proposal, const Coupling& coupling, F&& f,
                       typename Tgt::state_type x1, std::size_t T, const RandomStream& stream,
                       const RunOptions& opts = {}) {
  using State = typename Tgt::state_type;
  using Move = typename Prop::move_type;
  static_assert(std::same_as<Move, typename Coupling::move_type>, "coupling and proposal disagree on move type");

  const detail::Schedule schedule(T, opts);
  detail::Accumulator acc;
  EstimateReport report;

  State x = std::move(x1);
  State x_prev = x;
  State y = x;
  bool alive = false;  // false means y == x and carries no weight
  double w_alt = 0.0;
  std::size_t branch_start = 0;
  std::size_t accepted = 0;

  auto close_branch = [&](std::size_t step, BranchEnd how) {
    if (opts.trace_recoupling) report.recoupling.push_back({branch_start, step, how});
  };

  auto record = [&] {
    const auto fx = f(x);
    acc.add_primal(fx);
    if (alive) {
      acc.add_branch(w_alt, f(y), fx);
    } else if (w_alt != 0.0) {
      throw InvalidState("coupled alternative carries nonzero weight");
    }
  };

  if (schedule.records_at(0)) record();
  for (std::size_t s = 1; s <= schedule.total_steps(); ++s) {
    const StepDraws d(stream, s);
    DrawStream pr = d.proposal();
    const Move mx = proposal.propose(x, pr);

    std::optional<Move> my;
    if (alive) {
      auto [cx, cy] = coupling.sample_pair(x, y, d);
      if (!(cx == mx)) throw CouplingViolation("coupled proposal changed the primal move");
      my.emplace(std::move(cy));
    } else if (opts.check_stickiness) {
      auto [cx, cy] = coupling.sample_pair(x, x, d);
      if (!(cx == mx)) throw CouplingViolation("coupled proposal changed the primal move");
      if (!(cy == cx)) throw CouplingViolation("coupled proposal is not sticky: x == y but x' != y'");
    }

    // shared acceptance uniform for both chains
    const Dual ax = detail::move_acceptance(target, proposal, x, mx);
    DrawStream ar = d.accept();
    const double u = ar.uniform();
    const bool bx = u <= ax.value;
    if (alive) {
      const Dual ay = detail::move_acceptance(target, proposal, y, *my);
      if (u <= ay.value) proposal.apply(y, *my);
    }

    const BranchWeight w = flip_weight(ax, bx);
    x_prev = x;
    if (bx) {
      proposal.apply(x, mx);
      ++accepted;
    }

    if (alive && y == x) {
      close_branch(s, BranchEnd::recoupled);
      alive = false;
      w_alt = 0.0;
    }

    DrawStream rr = d.prune();
    const PruneResult pruned = prune(BranchWeight(w_alt), w, rr);
    if (pruned.take_new) {
      if (alive) close_branch(s, BranchEnd::replaced);
      // the branch takes the decision the primal did not
      y = x_prev;
      if (!bx) proposal.apply(y, mx);
      alive = true;
      branch_start = s;
    }
    w_alt = pruned.combined.value();
    if (w_alt == 0.0) alive = false;

    if (schedule.records_at(s)) record();
  }
  if (alive) close_branch(schedule.total_steps(), BranchEnd::end_of_chain);

  acc.finish(report);
  report.steps = schedule.total_steps();
  report.acceptance_rate = report.steps ? static_cast<double>(accepted) / static_cast<double>(report.steps) : 0.0;
  return report;
}

/// Score-function baseline: w accumulates d/dθ log P(decision) over all
/// decisions so far; each record adds w f(x).
template <DensityTarget Tgt, class Prop, class F>
  requires Proposal<Prop, typename Tgt::state_type>
EstimateReport score_run(const Tgt& target, const Prop& proposal, F&& f, typename Tgt::state_type x1, std::size_t T,
                         const RandomStream& stream, const RunOptions& opts = {},
                         ScoreVariant variant = ScoreVariant::realized_transition) {
  const detail::Schedule schedule(T, opts);
  detail::Accumulator acc;
  auto x = std::move(x1);
  double w = 0.0;
  std::size_t accepted = 0;

  auto record = [&] {
    const auto fx = f(x);
    acc.add_primal(fx);
    acc.add_score(w, fx);
  };

  if (schedule.records_at(0)) record();
  for (std::size_t s = 1; s <= schedule.total_steps(); ++s) {
    const StepDraws d(stream, s);
    DrawStream pr = d.proposal();
    const auto m = proposal.propose(x, pr);
    const Dual alpha = detail::move_acceptance(target, proposal, x, m);
    DrawStream ar = d.accept();
    if (ar.uniform() <= alpha.value) {
      if (alpha.value == 0.0) throw InvalidState("accepted a move with acceptance probability 0");
      w += alpha.deriv / alpha.value;
      proposal.apply(x, m);
      ++accepted;
    } else {
      if (alpha.value == 1.0) throw InvalidState("rejected a move with acceptance probability 1");
      if (variant == ScoreVariant::realized_transition) w -= alpha.deriv / (1.0 - alpha.value);
    }
    if (schedule.records_at(s)) record();
  }

  EstimateReport report;
  acc.finish(report);
  report.steps = schedule.total_steps();
  report.acceptance_rate = report.steps ? static_cast<double>(accepted) / static_cast<double>(report.steps) : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Recoupling diagnostics

/// (branch_step, end_step) for branches that recoupled.
inline std::vector<std::pair<std::size_t, std::size_t>> recoupling_trace(const EstimateReport& report) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& b : report.recoupling)
    if (b.end == BranchEnd::recoupled) out.emplace_back(b.branch_step, b.end_step);
  return out;
}

/// Kaplan-Meier median of the recoupling time. Branches replaced by pruning or
/// alive at the end of the chain are right-censored. Returns nullopt when the
/// survival curve never drops to one half.
inline std::optional<double> median_recoupling_time(const std::vector<BranchRecord>& branches) {
  std::vector<std::pair<std::size_t, bool>> events;  // (duration, recoupled)
  events.reserve(branches.size());
  for (const auto& b : branches) events.emplace_back(b.duration(), b.end == BranchEnd::recoupled);
  std::sort(events.begin(), events.end());

  double survival = 1.0;
  std::size_t at_risk = events.size();
  std::size_t i = 0;
  while (i < events.size()) {
    const std::size_t t = events[i].first;
    std::size_t deaths = 0;
    std::size_t leaving = 0;
    while (i < events.size() && events[i].first == t) {
      deaths += events[i].second ? 1 : 0;
      ++leaving;
      ++i;
    }
    if (deaths > 0) {
      survival *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
      if (survival <= 0.5) return static_cast<double>(t);
    }
    at_risk -= leaving;
  }
  return std::nullopt;
}

}  // namespace dmh
