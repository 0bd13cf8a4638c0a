#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dmh/couplings.hpp"
#include "dmh/proposals.hpp"
#include "dmh/random.hpp"
#include "dmh/targets/ising.hpp"
#include "stat_utils.hpp"

namespace dmh {
namespace {

constexpr std::size_t kDraws = 100000;

auto normal_cdf_at(double mean, double sd) {
  return [=](double v) { return test::normal_cdf((v - mean) / sd); };
}

TEST(CrnCouple, EqualStatesGiveEqualProposals) {
  const GaussianRandomWalk q{0.7};
  const RandomStream s(1);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto [a, b] = crn_couple(q, 0.3, 0.3, s.draws(i, Purpose::proposal));
    EXPECT_EQ(a, b);
  }
}

TEST(CrnCouple, GaussianWalkSharesTheIncrement) {
  const GaussianRandomWalk q{2.0};
  const RandomStream s(2);
  for (std::uint64_t i = 0; i < 100; ++i) {
    DrawStream probe = s.draws(i, Purpose::proposal);
    const double xi = probe.normal();
    const auto [a, b] = crn_couple(q, 0.0, 1.0, s.draws(i, Purpose::proposal));
    EXPECT_EQ(a, xi * 2.0);
    EXPECT_EQ(b, 1.0 + xi * 2.0);
  }
}

TEST(CrnCouple, MarginalIsTheProposal) {
  const GaussianRandomWalk q{1.0};
  const RandomStream s(3);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::uint64_t i = 0; i < kDraws; ++i) {
    const auto [a, b] = crn_couple(q, 0.0, 1.0, s.draws(i, Purpose::proposal));
    xs.push_back(a);
    ys.push_back(b);
  }
  EXPECT_GT(test::ks_pvalue(xs, normal_cdf_at(0.0, 1.0)), 0.01);
  EXPECT_GT(test::ks_pvalue(ys, normal_cdf_at(1.0, 1.0)), 0.01);
}

TEST(ReflectionMaximal, StickyWhenStatesAgree) {
  DrawStream r = RandomStream(4).sequential();
  for (int i = 0; i < 1000; ++i) {
    const auto [a, b] = reflection_maximal_gaussian(0.25, 0.25, 1.0, r);
    EXPECT_EQ(a, b);
  }
}

TEST(ReflectionMaximal, MeetingProbabilityIsMaximal) {
  // P(meet) = 2 Φ(-|x - y| / (2σ)) for a maximal coupling of two Gaussians
  DrawStream r = RandomStream(5).sequential();
  std::size_t met = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const auto [a, b] = reflection_maximal_gaussian(0.0, 1.0, 1.0, r);
    met += (a == b);
  }
  EXPECT_TRUE(test::binomial_within(met, kDraws, 2.0 * test::normal_cdf(-0.5), 3.0)) << met;
}

TEST(ReflectionMaximal, MarginalsAreCorrect) {
  DrawStream r = RandomStream(6).sequential();
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const auto [a, b] = reflection_maximal_gaussian(0.0, 1.5, 1.0, r);
    xs.push_back(a);
    ys.push_back(b);
  }
  EXPECT_GT(test::ks_pvalue(xs, normal_cdf_at(0.0, 1.0)), 0.01);
  EXPECT_GT(test::ks_pvalue(ys, normal_cdf_at(1.5, 1.0)), 0.01);
}

TEST(ReflectionMaximal, RejectsNonPositiveSigma) {
  DrawStream r = RandomStream(6).sequential();
  EXPECT_THROW(reflection_maximal_gaussian(0.0, 1.0, 0.0, r), InvalidArgument);
}

TEST(ReflectionMaximal, StepCouplingKeepsPrimalAndMarginal) {
  const ReflectionMaximalCoupling c{1.0};
  const GaussianRandomWalk q{1.0};
  const RandomStream s(7);
  std::vector<double> ys;
  for (std::uint64_t i = 0; i < kDraws; ++i) {
    const StepDraws d(s, i);
    const auto [a, b] = c.sample_pair(0.0, 1.5, d);
    DrawStream pr = d.proposal();
    EXPECT_EQ(a, q.propose(0.0, pr));
    ys.push_back(b);
  }
  EXPECT_GT(test::ks_pvalue(ys, normal_cdf_at(1.5, 1.0)), 0.01);
}

TEST(MaximalIndependent, IdenticalDistributionsAlwaysMeet) {
  DrawStream r = RandomStream(8).sequential();
  const std::vector<double> p{0.2, 0.3, 0.5};
  for (int i = 0; i < 10000; ++i) {
    const auto [a, b] = maximal_independent_couple(p, p, r);
    EXPECT_EQ(a, b);
  }
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

TEST(MaximalIndependent, MeetingFrequencyIsOneMinusTotalVariation) {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs{
      {{0.5, 0.5}, {0.25, 0.75}},
      {{0.1, 0.2, 0.3, 0.4}, {0.4, 0.3, 0.2, 0.1}},
      {{0.7, 0.0, 0.3}, {0.0, 0.6, 0.4}},
  };
  DrawStream r = RandomStream(9).sequential();
  for (const auto& [px, py] : pairs) {
    std::size_t met = 0;
    std::vector<std::size_t> cx(px.size(), 0);
    std::vector<std::size_t> cy(py.size(), 0);
    for (std::size_t i = 0; i < kDraws; ++i) {
      const auto [a, b] = maximal_independent_couple(px, py, r);
      met += (a == b);
      ++cx[a];
      ++cy[b];
    }
    EXPECT_TRUE(test::binomial_within(met, kDraws, 1.0 - total_variation(px, py), 3.0)) << met;
    EXPECT_GT(test::chi2_pvalue(cx, px), 0.01);
    EXPECT_GT(test::chi2_pvalue(cy, py), 0.01);
  }
}

TEST(MaximalIndependent, RejectsUnnormalizedInputs) {
  DrawStream r = RandomStream(10).sequential();
  const std::vector<double> good{0.5, 0.5};
  const std::vector<double> bad{0.5, 0.6};
  EXPECT_THROW(maximal_independent_couple(good, bad, r), InvalidArgument);
  EXPECT_THROW(maximal_independent_couple(bad, good, r), InvalidArgument);
  const std::vector<double> three{0.2, 0.3, 0.5};
  EXPECT_THROW(maximal_independent_couple(good, three, r), InvalidArgument);
}

TEST(MaximalIndependent, MatrixCouplingMarginals) {
  const MatrixProposal q({{0.1, 0.6, 0.3}, {0.5, 0.25, 0.25}, {0.3, 0.3, 0.4}});
  const MaximalIndependentCoupling c{q};
  const RandomStream s(11);
  std::vector<std::size_t> cx(3, 0);
  std::vector<std::size_t> cy(3, 0);
  for (std::uint64_t i = 0; i < kDraws; ++i) {
    const auto [a, b] = c.sample_pair(0, 1, StepDraws(s, i));
    ++cx[a];
    ++cy[b];
  }
  const std::vector<double> r0(q.row(0).begin(), q.row(0).end());
  const std::vector<double> r1(q.row(1).begin(), q.row(1).end());
  EXPECT_GT(test::chi2_pvalue(cx, r0), 0.01);
  EXPECT_GT(test::chi2_pvalue(cy, r1), 0.01);
}

TEST(IsingHeatBath, SameMoveForBothChains) {
  DrawStream r = RandomStream(12).sequential();
  const IsingLattice x(4, 1);
  const IsingLattice y(4, -1);
  for (int i = 0; i < 1000; ++i) {
    const auto [a, b] = ising_heatbath_coupled_proposal(x, y, r);
    EXPECT_EQ(a, b);
  }
  EXPECT_THROW(ising_heatbath_coupled_proposal(IsingLattice(4), IsingLattice(5), r), InvalidArgument);
}

TEST(IsingHeatBath, SitesAndSpinsAreUniform) {
  DrawStream r = RandomStream(13).sequential();
  const IsingLattice x(5, 1);
  std::vector<std::size_t> sites(25, 0);
  std::vector<std::size_t> spins(2, 0);
  for (std::size_t i = 0; i < kDraws; ++i) {
    const auto [a, b] = ising_heatbath_coupled_proposal(x, x, r);
    ++sites[a.site];
    ++spins[a.spin > 0];
  }
  EXPECT_GT(test::chi2_pvalue(sites, std::vector<double>(25, 1.0 / 25.0)), 0.01);
  EXPECT_GT(test::chi2_pvalue(spins, std::vector<double>(2, 0.5)), 0.01);
}

TEST(IsingHeatBath, CoupledStepPreservesOrder) {
  DrawStream r = RandomStream(14).sequential();
  const RandomStream steps(15);
  const IsingHeatBathProposal q;
  const IsingMonotoneCoupling c;
  for (int i = 0; i < 1000; ++i) {
    const IsingTarget target{1.0, 0.5 + 4.0 * r.uniform()};
    IsingLattice hi = IsingLattice::random(4, r);
    IsingLattice lo = hi;
    for (std::size_t s = 0; s < lo.num_sites(); ++s)
      if (r.uniform() < 0.5) lo.set(s, -1);
    ASSERT_TRUE(hi.dominates(lo));
    // several coupled MH steps with a shared acceptance uniform
    for (std::uint64_t t = 0; t < 20; ++t) {
      const StepDraws d(steps.substream(i), t);
      const auto [mh, ml] = c.sample_pair(hi, lo, d);
      DrawStream ar = d.accept();
      const double u = ar.uniform();
      const double ah = std::min(1.0, std::exp(target.log_ratio(hi, mh).value));
      const double al = std::min(1.0, std::exp(target.log_ratio(lo, ml).value));
      if (u <= ah) q.apply(hi, mh);
      if (u <= al) q.apply(lo, ml);
      ASSERT_TRUE(hi.dominates(lo)) << "pair " << i << " step " << t;
    }
  }
}

TEST(IsingIndependent, StickyButIndependentOtherwise) {
  const IsingIndependentCoupling c;
  const RandomStream s(16);
  const IsingLattice x(4, 1);
  const IsingLattice y(4, -1);
  std::size_t same = 0;
  std::vector<std::size_t> ysites(16, 0);
  for (std::uint64_t i = 0; i < kDraws; ++i) {
    const auto [a, b] = c.sample_pair(x, x, StepDraws(s, i));
    EXPECT_EQ(a, b);
    const auto [p, q] = c.sample_pair(x, y, StepDraws(s, i));
    same += (p == q);
    ++ysites[q.site];
  }
  // independent moves agree with probability 1/32
  EXPECT_TRUE(test::binomial_within(same, kDraws, 1.0 / 32.0, 4.0)) << same;
  EXPECT_GT(test::chi2_pvalue(ysites, std::vector<double>(16, 1.0 / 16.0)), 0.01);
}

// Stickiness is exact for every coupling: same state in, same move out.
TEST(Couplings, AllAreExactlySticky) {
  const RandomStream s(17);
  DrawStream r = RandomStream(18).sequential();
  const CrnCoupling<GaussianRandomWalk> crn{{1.0}};
  const ReflectionMaximalCoupling refl{1.0};
  const MaximalIndependentCoupling maxi{MatrixProposal({{0.2, 0.8}, {0.6, 0.4}})};
  const IsingMonotoneCoupling mono;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const StepDraws d(s, i);
    const double x = 4.0 * r.uniform() - 2.0;
    {
      const auto [a, b] = crn.sample_pair(x, x, d);
      EXPECT_EQ(a, b);
    }
    {
      const auto [a, b] = refl.sample_pair(x, x, d);
      EXPECT_EQ(a, b);
    }
    {
      const auto [a, b] = maxi.sample_pair(i % 2, i % 2, d);
      EXPECT_EQ(a, b);
    }
    {
      const IsingLattice l = IsingLattice::random(3, r);
      const auto [a, b] = mono.sample_pair(l, l, d);
      EXPECT_EQ(a, b);
    }
  }
}

}  // namespace
}  // namespace dmh
