#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "lostsales/app/oracles.hpp"
#include "lostsales/bounds.hpp"
#include "lostsales/demand.hpp"
#include "lostsales/error.hpp"
#include "lostsales/quadrature.hpp"
#include "lostsales/sim.hpp"

using namespace lostsales;

namespace {

DemandDistribution two_point() { return DemandDistribution::from_pmf({0, 2}, {0.5, 0.5}); }

}  // namespace

TEST(Constants, MReferenceValue) {
  EXPECT_DOUBLE_EQ(constant_m(two_point(), 1, 1), 16900.0);
  // h enters only through c / (h sigma)
  const auto d = truncate_geometric(0.5, 1e-6);
  double prev = std::numeric_limits<double>::infinity();
  for (double h : {0.5, 1.0, 2.0, 4.0}) {
    const double m = constant_m(d, 1, h);
    EXPECT_LE(m, prev);
    EXPECT_GE(m, 26.0 * 26.0);
    prev = m;
  }
}

TEST(Constants, ThresholdResubstitution) {
  // Q = 0, g = 1, E[D] = 1, E[D^2] = 2, sigma = 1, m = 16900, c = h = 1
  const double eps = 0.5;
  const double lin = std::pow(2.0, 14) * (0 + std::pow(2.0, 1.5)) * std::pow(1.0 + 2.0, 3) * std::pow(16900.0, 3) / eps;
  const double quad = std::pow(12.0 * (std::sqrt(2.0) + 3.0), 2) / (eps * eps);
  const auto y = threshold_y(two_point(), 1, 1, eps);
  EXPECT_NEAR(y.linear_term / lin, 1.0, 1e-12);
  EXPECT_NEAR(y.quadratic_term / quad, 1.0, 1e-12);
  EXPECT_EQ(y.binding, "eps^-1");
  EXPECT_GE(y.value, 1e9);
}

TEST(Constants, ThresholdMonotoneAndQuadraticEventuallyBinds) {
  const auto d = two_point();
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.01, 0.1, 0.3, 0.6, 0.9}) {
    const double y = threshold_y(d, 1, 1, eps).value;
    EXPECT_LE(y, prev);
    prev = y;
  }
  EXPECT_EQ(threshold_y(d, 1, 1, 1e-30).binding, "eps^-2");
  EXPECT_THROW(threshold_y(d, 1, 1, 0.0), Error);
  EXPECT_THROW(threshold_y(d, 1, 1, 1.0), Error);
}

TEST(Certificate, StatesNonReproducibility) {
  const auto cert = theorem1_certificate(two_point(), 1, 1, 4, 12, 0.5);
  EXPECT_FALSE(cert.hypotheses_met);
  EXPECT_FALSE(cert.desk_reproducible);
  EXPECT_EQ(cert.required_L, std::ceil(cert.y.value));
  EXPECT_DOUBLE_EQ(cert.required_T, 28.0);
  EXPECT_NE(cert.statement.find("NOT desk-reproducible"), std::string::npos);
}

TEST(LowerBound, MatchesBoxEnumeration) {
  const auto d = two_point();
  const double c = 4, h = 1;
  const std::int64_t L = 2;
  auto s = rng::Stream::child(1, "test.lb", 0);
  const auto sol = lower_bound_optimize(d, c, h, L, s);
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= 2; ++b) {
      for (int I = 0; I <= 10; ++I) {
        best = std::min(best, window_cost_enumerate({double(a), double(b)}, I, d, c, h).value);
      }
    }
  }
  EXPECT_NEAR(sol.objective, best, 1e-9);
  EXPECT_NEAR(window_cost_enumerate(sol.x_real(), sol.I_real(), d, c, h).value, sol.objective, 1e-9);
  EXPECT_LE(sol.objective, c * L * d.mean());
  for (auto v : sol.x) {
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 2);
  }
}

TEST(LowerBound, CoordinateDescentPathAgreesWithExhaustive) {
  const auto d = truncate_geometric(0.5, 1e-6);
  auto s1 = rng::Stream::child(1, "test.lb", 1);
  auto s2 = rng::Stream::child(1, "test.lb", 2);
  LowerBoundOptions forced;
  forced.exhaustive_limit = 0;
  const auto ex = lower_bound_optimize(d, 4, 1, 2, s1);
  const auto cd = lower_bound_optimize(d, 4, 1, 2, s2, forced);
  EXPECT_TRUE(ex.exhaustive);
  EXPECT_FALSE(cd.exhaustive);
  EXPECT_NEAR(cd.objective, ex.objective, 1e-9);
}

TEST(LowerBound, InventoryCapForms) {
  const auto d = two_point();
  EXPECT_DOUBLE_EQ(inventory_cap(d, 1, 1, 4), 5.0);
  auto s = rng::Stream::child(1, "test.lb", 3);
  const auto sol = lower_bound_optimize(d, 4, 1, 3, s);
  const auto rep = inventory_cap_check(d, 4, 1, 3, sol);
  EXPECT_TRUE(rep.pass_scaled);
  EXPECT_FALSE(sol.inventory_on_boundary);
}

TEST(LowerBound, MarginReport) {
  const auto d = two_point();
  auto s = rng::Stream::child(1, "test.lb", 4);
  const auto sol = lower_bound_optimize(d, 1, 1, 4, s);
  const auto rep = rstar_margin_check(d, 1, 1, 4, sol);
  EXPECT_FALSE(rep.hypothesis_met);
  EXPECT_NEAR(rep.required_L / (8 * std::pow(16900.0, 1.5)), 1.0, 1e-12);
  EXPECT_TRUE(rep.r_star_below_mean);
}

TEST(Gap, CertificateAndCoupling) {
  const auto d = truncate_geometric(0.5, 1e-6);
  auto s = rng::Stream::child(2, "test.gap", 0);
  const auto sol = lower_bound_optimize(d, 4, 1, 3, s);
  ASSERT_TRUE(sol.r_star_below_mean);
  auto gs = rng::Stream::child(2, "test.gap", 1);
  const auto rep = gap_certificate(d, 4, 1, sol, 20'000, gs);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_NEAR(rep.pi_rstar.mean, rep.pi_rstar_exact, 5 * rep.pi_rstar.std_error + 1e-9);
  EXPECT_LE(rep.refined.mean, rep.lower_bound_exact + 4 * rep.refined.std_error);
}

TEST(Gap, DegenerateRateIsNamed) {
  const auto d = two_point();
  auto s = rng::Stream::child(2, "test.gap", 2);
  const auto sol = lower_bound_optimize(d, 9, 1, 2, s);
  ASSERT_FALSE(sol.r_star_below_mean);
  auto gs = rng::Stream::child(2, "test.gap", 3);
  try {
    gap_certificate(d, 9, 1, sol, 100, gs);
    FAIL() << "expected RStarDegenerate";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RStarDegenerate);
  }
}

TEST(Normal, QuadratureMatchesClosedForm) {
  for (double y : {-4.0, -1.0, -0.3, 0.0, 0.7, 2.0, 5.0}) {
    EXPECT_NEAR(quad::psi(y), oracle::normal_positive_part(y), 1e-12) << y;
  }
  EXPECT_NEAR(quad::psi(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-14);
}

TEST(Normal, ConstantBelowThirteen) {
  const auto rep = normal_constant_check();
  EXPECT_NEAR(rep.expectation, 0.08332, 1e-5);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.reciprocal, 12.0, 0.01);
}

TEST(Stein, SingleSummandHalfMean) {
  auto s = rng::Stream::child(4, "test.stein", 0);
  const auto rep = stein_check(two_point(), 0.0, 1, 100'000, s);
  EXPECT_NEAR(rep.mc_mean, 0.5, 5 * rep.mc_std_error + 1e-12);
  EXPECT_NEAR(rep.lhs, 0.5 - 1.0 / std::sqrt(2.0 * std::numbers::pi), 0.01);
  EXPECT_DOUBLE_EQ(rep.rhs, 3.0);
  EXPECT_TRUE(rep.pass);
}

TEST(Stein, ErrorShrinksWithN) {
  auto s = rng::Stream::child(4, "test.stein", 1);
  const auto small = stein_check(two_point(), 0.0, 4, 200'000, s);
  const auto large = stein_check(two_point(), 0.0, 64, 200'000, s);
  EXPECT_TRUE(small.pass);
  EXPECT_TRUE(large.pass);
  EXPECT_LT(large.lhs, small.lhs);
}
