#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dmh/oracles.hpp"
#include "dmh/targets/ising.hpp"

namespace dmh {
namespace {

TEST(EnumeratePosterior, FrozenValuesAtFour) {
  const auto pv = oracle::enumerate_posterior(4.0);
  EXPECT_NEAR(pv.p[0], 0.12604026, 1e-8);
  EXPECT_NEAR(pv.p[1], 0.41651143, 1e-8);
  EXPECT_NEAR(pv.p[2], 0.45744831, 1e-8);
  EXPECT_NO_THROW(pv.validate(1e-12));
  EXPECT_NEAR(pv.dp[0] + pv.dp[1] + pv.dp[2], 0.0, 1e-15);
}

TEST(EnumeratePosterior, DerivativesMatchFiniteDifferences) {
  for (double h : {-5.0, 0.4, 1.0, 4.0, 8.0}) {
    const auto pv = oracle::enumerate_posterior(h);
    for (std::size_t j = 0; j < 3; ++j) {
      const double fd = oracle::finite_difference([&](double x) { return oracle::enumerate_posterior(x).p[j]; }, h, 1e-5);
      EXPECT_NEAR(pv.dp[j], fd, 1e-5 * std::max(1e-3, std::abs(fd)));
    }
  }
}

TEST(EnumeratePosterior, DominantComponent) {
  EXPECT_NEAR(oracle::enumerate_posterior(-20.0).p[0], 0.996098793, 1e-9);
  const MixtureModel far{{-1e3, 2.0, 1e3}, 4.0};
  EXPECT_NEAR(oracle::enumerate_posterior(2.0, far).p[1], 1.0, 1e-12);
}

TEST(Entropy, ArgmaxIsStationary) {
  const double h = oracle::entropy_argmax();
  EXPECT_NEAR(h, 1.0660804795568934, 1e-6);
  EXPECT_NEAR(oracle::posterior_entropy(h), 1.0777760970478742, 1e-10);
  EXPECT_NEAR(oracle::posterior_entropy_gradient(h), 0.0, 1e-6);
  EXPECT_NEAR(oracle::finite_difference([](double x) { return oracle::posterior_entropy(x); }, h, 1e-5), 0.0, 1e-6);
}

TEST(Entropy, GradientAtTheVarianceObservation) {
  EXPECT_NEAR(oracle::posterior_entropy_gradient(0.4), 0.0183685, 1e-6);
}

TEST(FiniteDifference, Quadratic) {
  EXPECT_NEAR(oracle::finite_difference([](double t) { return t * t; }, 3.0, 1e-5), 6.0, 1e-6);
}

oracle::DiscreteChainSpec swap_chain(std::size_t T) {
  return {[](double th) { return std::vector<double>{0.0, th}; }, {{0.0, 1.0}, {1.0, 0.0}}, 0, T};
}

TEST(FiniteT, SwapChainExamples) {
  const std::vector<double> f{0.0, 1.0};
  EXPECT_EQ(oracle::finite_T_expectation(swap_chain(1), f, 0.3), 0.0);
  EXPECT_NEAR(oracle::finite_T_expectation(swap_chain(2), f, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(oracle::finite_T_expectation(swap_chain(2), f, -0.5), std::exp(-0.5) / 2.0, 1e-15);
  const double d = oracle::finite_difference(
      [&](double th) { return oracle::finite_T_expectation(swap_chain(2), f, th); }, -0.5, 1e-5);
  EXPECT_NEAR(d, std::exp(-0.5) / 2.0, 1e-8);
}

TEST(FiniteT, TransitionMatrixIsStochasticAndReversible) {
  const oracle::DiscreteChainSpec spec{[](double th) { return std::vector<double>{0.0, th, -0.4, 1.2 * th}; },
                                       std::vector<std::vector<double>>(4, std::vector<double>(4, 0.25)), 0, 3};
  const double theta = 0.7;
  const auto P = oracle::transition_matrix(spec, theta);
  const auto lw = spec.log_weights(theta);
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      s += P[i][j];
      EXPECT_NEAR(std::exp(lw[i]) * P[i][j], std::exp(lw[j]) * P[j][i], 1e-12);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(FiniteT, RejectsBadSpecs) {
  const std::vector<double> f{0.0, 1.0};
  auto spec = swap_chain(2);
  spec.proposal = {{0.5, 0.6}, {1.0, 0.0}};
  EXPECT_THROW(oracle::finite_T_expectation(spec, f, 0.0), InvalidArgument);
  EXPECT_THROW(oracle::finite_T_expectation(swap_chain(0), f, 0.0), InvalidArgument);
  EXPECT_THROW(oracle::finite_T_expectation(swap_chain(2), {1.0}, 0.0), InvalidArgument);
}

TEST(IsingExhaustive, FrozenValueAtTwo) {
  const auto e = oracle::ising_exhaustive_heat_capacity(2, 1.0, 2.0);
  EXPECT_NEAR(e.heat_capacity, 1.4443839501910603, 1e-12);
  EXPECT_NEAR(e.dC_dT, 0.9057648, 1e-6);
}

TEST(IsingExhaustive, HighTemperatureLimit) {
  EXPECT_LT(oracle::ising_exhaustive_heat_capacity(2, 1.0, 100.0).heat_capacity, 0.05);
}

TEST(IsingExhaustive, DerivativeMatchesFiniteDifference) {
  for (std::size_t L : {2u, 3u}) {
    for (double T : {1.0, 2.0, 2.5, 4.0}) {
      const auto e = oracle::ising_exhaustive_heat_capacity(L, 1.0, T);
      const double fd = oracle::finite_difference(
          [&](double t) { return oracle::ising_exhaustive_heat_capacity(L, 1.0, t).heat_capacity; }, T, 1e-5);
      EXPECT_NEAR(e.dC_dT, fd, 1e-6 * std::abs(fd)) << "L=" << L << " T=" << T;
      const double fd_e = oracle::finite_difference(
          [&](double t) { return oracle::ising_exhaustive_heat_capacity(L, 1.0, t).mean_energy; }, T, 1e-5);
      EXPECT_NEAR(e.heat_capacity, fd_e, 1e-6 * e.heat_capacity);
    }
  }
}

TEST(IsingExhaustive, GroundStateAtLowTemperature) {
  const auto e = oracle::ising_exhaustive_heat_capacity(3, 1.0, 0.05);
  EXPECT_NEAR(e.mean_energy, -18.0, 1e-9);
}

TEST(IsingExhaustive, RejectsLargeLattices) {
  EXPECT_THROW(oracle::ising_exhaustive_heat_capacity(5, 1.0, 2.0), InvalidArgument);
  EXPECT_THROW(oracle::ising_exhaustive_heat_capacity(2, 1.0, 0.0), InvalidArgument);
}

}  // namespace
}  // namespace dmh
