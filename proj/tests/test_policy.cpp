#include <gtest/gtest.h>

#include <cmath>

#include "lostsales/app/oracles.hpp"
#include "lostsales/demand.hpp"
#include "lostsales/error.hpp"
#include "lostsales/policy.hpp"

using namespace lostsales;

namespace {

DemandDistribution two_point() { return DemandDistribution::from_pmf({0, 2}, {0.5, 0.5}); }

}  // namespace

TEST(StationaryCost, TwoPointReference) {
  const auto d = two_point();
  const auto sup = stationary_waiting(d, 0.5);
  const double e = oracle::skip_free_supremum_mean({1, -3}, {0.5, 0.5}, 0.5);
  EXPECT_NEAR(stationary_cost(d, 1, 1, 0.5, sup), e + 0.5, 1e-9);
  EXPECT_NEAR(stationary_cost(d, 3, 2, 0.5, sup), 2 * e + 1.5, 1e-9);
}

TEST(BestConstant, TwoPointUnitCostsOrdersNothing) {
  const auto zs = best_constant_z(two_point(), 1, 1);
  EXPECT_DOUBLE_EQ(zs.z, 0.0);
  EXPECT_NEAR(zs.cost, 1.0, 1e-12);
}

TEST(BestConstant, GridMinimumIsReported) {
  const auto d = DemandDistribution::from_pmf({0, 1, 2, 3}, {0.2, 0.3, 0.3, 0.2});
  const auto zs = best_constant_z(d, 9, 1);
  ASSERT_FALSE(zs.grid.empty());
  for (const auto& p : zs.grid) EXPECT_GE(p.objective, zs.objective - 1e-12);
  EXPECT_GT(zs.z, 0.0);
  EXPECT_LT(zs.z, d.mean());
  EXPECT_NEAR(zs.cost, zs.objective + 9 * d.mean(), 1e-9);
}

TEST(ConstantOrder, FirstOrderLawIsShiftedSupremum) {
  const auto d = two_point();
  const auto pol = make_constant_order(d, 0.5);
  DecisionContext ctx;
  ctx.L = 2;
  ctx.T = 5;
  ctx.demand = &d;
  ctx.scale = pol->required_scale();
  const auto law = pol->first_order_law(ctx);
  double mass = 0, mean = 0;
  for (const auto& [ticks, p] : law) {
    mass += p;
    mean += p * static_cast<double>(ticks) / static_cast<double>(ctx.scale);
  }
  EXPECT_NEAR(mass, 1.0, 1e-9);
  EXPECT_NEAR(mean, pol->supremum().mean + 0.5, 1e-6);

  SystemState st;
  st.t = 3;
  st.pipeline = {0, 0};
  rng::Stream s(1);
  EXPECT_EQ(pol->order(ctx, st, s), 1);  // 0.5 at two ticks per unit
}

TEST(ConstantOrder, RejectsRateAtMean) { EXPECT_THROW(make_constant_order(two_point(), 1.0), Error); }

TEST(BaseStock, OrdersUpToLevel) {
  const auto d = two_point();
  const auto pol = make_base_stock(4, d);
  DecisionContext ctx;
  ctx.L = 2;
  ctx.T = 5;
  ctx.demand = &d;
  SystemState st;
  st.t = 2;
  st.inventory = 1;
  st.pipeline = {1, 0};
  rng::Stream s(1);
  EXPECT_EQ(pol->order(ctx, st, s), 2);
  st.inventory = 5;
  EXPECT_EQ(pol->order(ctx, st, s), 0);
}
