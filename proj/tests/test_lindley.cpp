#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lostsales/app/oracles.hpp"
#include "lostsales/demand.hpp"
#include "lostsales/error.hpp"
#include "lostsales/lindley.hpp"

using namespace lostsales;

namespace {

DemandDistribution two_point() { return DemandDistribution::from_pmf({0, 2}, {0.5, 0.5}); }

// Law of i_k for the two-point walk at r = 0.5 (steps +1, -3 ticks), the
// independent supremum at index k having P(I = n ticks) = (1 - eta) eta^n.
std::vector<double> argmax_law(std::int64_t k, bool largest) {
  const double eta = oracle::skip_free_eta({1, -3}, {0.5, 0.5});
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::int64_t seq = 0; seq < (1 << k); ++seq) {
    std::vector<std::int64_t> walk{0};
    for (std::int64_t j = 0; j < k; ++j) walk.push_back(walk.back() + (((seq >> j) & 1) ? -3 : 1));
    const double pseq = std::pow(0.5, static_cast<double>(k));
    for (std::int64_t n = 0; n < 200; ++n) {
      const double pn = (1 - eta) * std::pow(eta, static_cast<double>(n));
      std::int64_t best = walk[0], arg = 0;
      for (std::int64_t j = 1; j <= k; ++j) {
        const std::int64_t v = walk[static_cast<std::size_t>(j)] + (j == k ? n : 0);
        if (v > best || (largest && v == best)) {
          best = v;
          arg = j;
        }
      }
      if (k == 0) arg = 0;
      out[static_cast<std::size_t>(arg)] += pseq * pn;
    }
  }
  return out;
}

}  // namespace

TEST(Lindley, TwoPointMeanMatchesSkipFreeRoot) {
  const auto sup = stationary_waiting(two_point(), 0.5);
  EXPECT_NEAR(sup.mean, oracle::skip_free_supremum_mean({1, -3}, {0.5, 0.5}, 0.5), 1e-9);
  EXPECT_NEAR(sup.mean, 0.59575, 1e-5);
  EXPECT_LT(sup.residual, 1e-9);
}

TEST(Lindley, TwoPointTailIsGeometric) {
  const auto sup = stationary_waiting(two_point(), 0.5);
  const double eta = oracle::skip_free_eta({1, -3}, {0.5, 0.5});
  EXPECT_NEAR(eta, 0.54369, 1e-5);
  EXPECT_NEAR(eta * eta * eta + eta * eta + eta, 1.0, 1e-12);
  for (std::int64_t n = 0; n <= 40; ++n) {
    EXPECT_NEAR(sup.prob_at_least(n), std::pow(eta, static_cast<double>(n)), 1e-9) << n;
  }
}

TEST(Lindley, ThreePointSkipFreeWalk) {
  // steps r - D in {+1, 0, -2}
  const auto d = DemandDistribution::from_pmf({0, 1, 3}, {0.3, 0.3, 0.4});
  const auto sup = stationary_waiting(d, 1.0);
  EXPECT_NEAR(sup.mean, oracle::skip_free_supremum_mean({1, 0, -2}, {0.3, 0.3, 0.4}, 1.0), 1e-9);
}

TEST(Lindley, StepPreservesMass) {
  const auto d = DemandDistribution::from_pmf({0, 1, 3}, {0.3, 0.3, 0.4});
  const auto lat = rate_lattice(d, 1.0);
  std::vector<double> pmf{0.2, 0.3, 0.1, 0.4};
  const auto next = lindley_step(d, lat, pmf);
  EXPECT_NEAR(std::accumulate(next.begin(), next.end(), 0.0), 1.0, 1e-15);
}

TEST(Lindley, ThetaReferenceValue) { EXPECT_NEAR(theta(two_point(), 0.5), 1.0 / 48.0, 1e-15); }

TEST(Lindley, RejectsRateAtOrAboveMean) {
  EXPECT_THROW(stationary_waiting(two_point(), 1.0), Error);
  EXPECT_THROW(theta(two_point(), 1.5), Error);
}

TEST(Lindley, RateLatticeSplitsUnit) {
  const auto lat = rate_lattice(two_point(), 0.75);
  EXPECT_EQ(lat.scale, 4);
  EXPECT_EQ(lat.up, 3);
  EXPECT_DOUBLE_EQ(lat.tick, 0.25);
}

TEST(WalkArgmax, LargestIndexWinsTies) {
  const std::vector<int> v{0, 2, 1, 2};
  EXPECT_EQ(walk_max_argmax<int>(v, 0).second, 3u);
  EXPECT_EQ(walk_max_argmax<int>(v, 5), (std::pair<int, std::size_t>{7, 3}));
  const std::vector<int> w{3, 1, 2};
  EXPECT_EQ(walk_max_argmax<int>(w, 1).second, 2u);
  EXPECT_EQ(walk_max_argmax<int>(w, 0).second, 0u);
}

TEST(Argmax, FiniteExactMatchesOracle) {
  const auto d = two_point();
  const auto sup = stationary_waiting(d, 0.5);
  for (std::int64_t k = 1; k <= 6; ++k) {
    const auto exact = argmax_finite_exact(d, 0.5, k, sup);
    const auto ref = argmax_law(k, true);
    ASSERT_EQ(exact.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(exact[i], ref[i], 1e-9) << "k=" << k << " i=" << i;
  }
}

TEST(Argmax, WrongTieBreakIsDetectable) {
  const auto d = two_point();
  const auto sup = stationary_waiting(d, 0.5);
  double worst = 0;
  for (std::int64_t k = 1; k <= 4; ++k) {
    worst = std::max(worst, oracle::total_variation(argmax_finite_exact(d, 0.5, k, sup), argmax_law(k, false)));
  }
  EXPECT_GT(worst, 0.01);
}

TEST(Argmax, HorizonCertificate) {
  const double th = 1.0 / 48.0;
  const auto K = argmax_horizon(th, 1e-6);
  EXPECT_LE(std::pow(1 - th, static_cast<double>(K)) / th, 1e-6);
  EXPECT_GT(std::pow(1 - th, static_cast<double>(K - 1)) / th, 1e-6);
}

TEST(Argmax, MonteCarloAgreesWithExact) {
  const auto d = two_point();
  const auto sup = stationary_waiting(d, 0.5);
  auto s = rng::Stream::child(11, "test.argmax", 0);
  const auto mc = argmax_distribution_mc(d, 0.5, 1e-6, 100'000, s);
  for (std::int64_t k = 1; k <= 4; ++k) {
    EXPECT_LE(oracle::total_variation(argmax_finite_exact(d, 0.5, k, sup), mc.min_with(k)), 0.01);
  }
}

TEST(Argmax, TailSuitePasses) {
  auto s = rng::Stream::child(5, "test.tail", 0);
  const auto rep = verify_tail_suite(two_point(), 0.5, 50'000, s);
  EXPECT_TRUE(rep.all_pass());
  EXPECT_NEAR(rep.theta, 1.0 / 48.0, 1e-15);
}
