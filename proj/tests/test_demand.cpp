#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/error.hpp"
#include "lostsales/rational.hpp"
#include "lostsales/rng.hpp"

using namespace lostsales;

namespace {

DemandDistribution two_point() { return DemandDistribution::from_pmf({0, 2}, {0.5, 0.5}); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ConfigError;
}

// h E[(s-D)^+] + c E[(D-s)^+] straight from the pmf
double direct_cost(const std::vector<std::int64_t>& atoms, const std::vector<double>& probs, double c, double h,
                   double s) {
  double v = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double dd = static_cast<double>(atoms[i]);
    v += probs[i] * (h * std::max(0.0, s - dd) + c * std::max(0.0, dd - s));
  }
  return v;
}

}  // namespace

TEST(Demand, TwoPointMoments) {
  const auto d = two_point();
  EXPECT_DOUBLE_EQ(d.mean(), 1.0);
  EXPECT_DOUBLE_EQ(d.second_moment(), 2.0);
  EXPECT_DOUBLE_EQ(d.sigma(), 1.0);
  EXPECT_DOUBLE_EQ(d.zeta(), 1.0);
}

TEST(Demand, RejectsBadPmfs) {
  EXPECT_EQ(code_of([] { DemandDistribution::from_pmf({0, 1}, {0.5, 0.6}); }), ErrorCode::NonStochastic);
  EXPECT_EQ(code_of([] { DemandDistribution::from_pmf({3}, {1.0}); }), ErrorCode::Deterministic);
  EXPECT_EQ(code_of([] { DemandDistribution::from_pmf({-1, 2}, {0.5, 0.5}); }), ErrorCode::NegativeAtom);
}

TEST(Demand, ZeroMassAtomsDropped) {
  const auto d = DemandDistribution::from_pmf({0, 1, 2}, {0.5, 0.0, 0.5});
  EXPECT_EQ(d.support_size(), 2u);
}

TEST(Newsvendor, TwoPointUnitCosts) {
  const auto nv = newsvendor(two_point(), 1, 1);
  EXPECT_EQ(nv.q_lattice, 0);
  EXPECT_DOUBLE_EQ(nv.g, 1.0);
}

TEST(Newsvendor, GeometricQuantile) {
  const auto d = truncate_geometric(0.2, 1e-9);
  // smallest s with 0.8^(s+1) <= 0.1
  std::int64_t s = 0;
  while (std::pow(0.8, static_cast<double>(s + 1)) > 0.1) ++s;
  EXPECT_EQ(s, 10);
  EXPECT_EQ(newsvendor(d, 9, 1).q_lattice, s);
}

TEST(Newsvendor, QuantileMinimisesSinglePeriodCost) {
  const std::vector<std::int64_t> atoms{0, 1, 3, 4, 7};
  const std::vector<double> probs{0.1, 0.3, 0.25, 0.2, 0.15};
  const auto d = DemandDistribution::from_pmf(atoms, probs);
  for (double c : {0.5, 1.0, 3.0, 9.0, 19.0}) {
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= 8; ++s) best = std::min(best, direct_cost(atoms, probs, c, 1.0, s));
    const auto nv = newsvendor(d, c, 1.0);
    EXPECT_NEAR(nv.g, best, 1e-12) << "c=" << c;
    EXPECT_NEAR(single_period_cost(d, c, 1.0, nv.q_lattice), best, 1e-12);
  }
}

TEST(Demand, TruncatedFamiliesRespectTail) {
  const auto g = truncate_geometric(0.5, 1e-6);
  EXPECT_LE(g.truncated_mass(), 1e-6);
  EXPECT_NEAR(g.mean(), 1.0, 1e-4);
  const auto p = truncate_poisson(5.0, 1e-6);
  EXPECT_LE(p.truncated_mass(), 1e-6);
  EXPECT_NEAR(p.mean(), 5.0, 1e-4);
  EXPECT_NEAR(p.variance(), 5.0, 1e-3);
}

TEST(Demand, SamplerMatchesPmf) {
  const auto d = DemandDistribution::from_pmf({0, 1, 5}, {0.2, 0.5, 0.3});
  DemandSampler sampler(d);
  auto s = rng::Stream::child(7, "test.sampler", 0);
  const int n = 200000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[sampler.draw_index(s)];
  for (std::size_t i = 0; i < 3; ++i) {
    const double p = d.probs()[i];
    EXPECT_NEAR(counts[i] / static_cast<double>(n), p, 5 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(Demand, LatticeUnitScalesMoments) {
  const auto d = DemandDistribution::from_pmf({0, 4}, {0.5, 0.5}, Rational(1, 4));
  EXPECT_DOUBLE_EQ(d.mean(), 0.5);
  EXPECT_DOUBLE_EQ(d.sigma(), 0.5);
}

TEST(Rational, ParseAndArithmetic) {
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-1.5"), Rational(-3, 2));
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
  EXPECT_EQ(lcm(4, 6), 12);
  EXPECT_EQ(rationalize(0.375).value(), Rational(3, 8));
}

TEST(Rng, FnvReferenceVectors) {
  EXPECT_EQ(rng::fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(rng::fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(rng::fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Rng, ChildSeedFormula) {
  const std::uint64_t root = 12345;
  const auto expect = rng::mix64(rng::mix64(rng::mix64(root) ^ rng::fnv1a64("sim.demand")) ^ 3u);
  EXPECT_EQ(rng::hash64(root, "sim.demand", 3), expect);
  EXPECT_EQ(rng::Stream::child(root, "sim.demand", 3).seed(), expect);
  EXPECT_NE(rng::hash64(root, "sim.demand", 3), rng::hash64(root, "sim.policy", 3));
}

TEST(Rng, UniformRange) {
  rng::Stream s(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
