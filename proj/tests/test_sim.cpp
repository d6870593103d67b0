#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/dp.hpp"
#include "lostsales/error.hpp"
#include "lostsales/policy.hpp"
#include "lostsales/sim.hpp"

using namespace lostsales;

namespace {

DemandDistribution two_point() { return DemandDistribution::from_pmf({0, 2}, {0.5, 0.5}); }

// L periods receiving x[0], x[1], ... on top of I, over every demand sequence
double window_oracle(const std::vector<double>& x, double I, const std::vector<double>& atoms,
                     const std::vector<double>& probs, double c, double h) {
  const std::size_t L = x.size();
  std::size_t paths = 1;
  for (std::size_t i = 0; i < L; ++i) paths *= atoms.size();
  double total = 0;
  for (std::size_t p = 0; p < paths; ++p) {
    std::size_t rem = p;
    double pr = 1, inv = I, cost = 0;
    for (std::size_t i = 0; i < L; ++i) {
      const std::size_t k = rem % atoms.size();
      rem /= atoms.size();
      pr *= probs[k];
      const double on_hand = inv + x[i];
      cost += c * std::max(0.0, atoms[k] - on_hand);
      inv = std::max(0.0, on_hand - atoms[k]);
      cost += h * inv;
    }
    total += pr * cost;
  }
  return total;
}

}  // namespace

TEST(WindowCost, FormulaMatchesHandOracle) {
  const auto d = DemandDistribution::from_pmf({0, 1, 3}, {0.3, 0.3, 0.4});
  const std::vector<std::vector<double>> xs{{0}, {2}, {1, 0}, {0, 3}, {2, 1, 1}, {0, 0, 4}};
  for (const auto& x : xs) {
    for (double I : {0.0, 1.0, 2.0, 5.0}) {
      const double ref = window_oracle(x, I, {0, 1, 3}, {0.3, 0.3, 0.4}, 4, 1);
      EXPECT_NEAR(window_cost_formula(x, I, d, 4, 1).value, ref, 1e-9);
      EXPECT_NEAR(window_cost_enumerate(x, I, d, 4, 1).value, ref, 1e-9);
      EXPECT_NEAR(window_cost_dynamics(quantize(x, I, d), d, 4, 1).value, ref, 1e-9);
    }
  }
}

TEST(WindowCost, ScenarioVersionIsUnbiased) {
  const auto d = two_point();
  auto s = rng::Stream::child(3, "test.scenarios", 0);
  const auto sc = ScenarioSet::draw(d, 3, 50'000, s);
  const std::vector<double> x{1, 0.5, 2};
  const auto exact = window_cost_formula(x, 1.0, d, 4, 1);
  const auto mc = window_cost_formula(x, 1.0, d, 4, 1, sc);
  EXPECT_FALSE(mc.exact);
  EXPECT_NEAR(mc.value, exact.value, 5 * mc.std_error);
}

TEST(WindowCost, RejectsOffLatticeInput) {
  const auto d = two_point();
  EXPECT_THROW(quantize({std::sqrt(2.0)}, 0.0, d), Error);
}

TEST(Trajectory, ZeroPolicyLosesAllDemand) {
  const auto d = two_point();
  ZeroPolicy zero;
  auto ds = rng::Stream::child(1, "sim.demand", 0);
  auto ps = rng::Stream::child(1, "sim.policy", 0);
  const auto traj = run_trajectory(zero, d, 1, 1, 2, 10, ds, ps);
  ASSERT_EQ(traj.records.size(), 12u);
  for (const auto& r : traj.records) {
    EXPECT_EQ(r.I, 0);
    EXPECT_EQ(r.N, r.D);
  }
  EXPECT_EQ(traj.to_csv().substr(0, 17), "t,I,x1,order,D,N,");
}

TEST(Trajectory, ConservationOnEveryWindow) {
  const auto d = DemandDistribution::from_pmf({0, 1, 3}, {0.3, 0.3, 0.4});
  const auto pol = make_constant_order(d, 1.25);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    auto ds = rng::Stream::child(9, "sim.demand", rep);
    auto ps = rng::Stream::child(9, "sim.policy", rep);
    const auto traj = run_trajectory(*pol, d, 2, 1, 3, 15, ds, ps);
    const auto n = static_cast<std::int64_t>(traj.records.size());
    for (std::int64_t a = 1; a <= n; ++a) {
      for (std::int64_t b = a + 1; b <= n + 1; ++b) ASSERT_EQ(conservation_check(traj, a, b), 0);
    }
  }
}

TEST(Trajectory, OrdersStopAfterHorizon) {
  const auto d = two_point();
  const auto pol = make_base_stock(4, d);
  auto ds = rng::Stream::child(2, "sim.demand", 0);
  auto ps = rng::Stream::child(2, "sim.policy", 0);
  const auto traj = run_trajectory(*pol, d, 1, 1, 2, 6, ds, ps);
  for (const auto& r : traj.records) {
    if (r.t > 6) {
      EXPECT_EQ(r.order, 0);
    }
  }
}

TEST(Simulate, ConstantOrderIsStationaryFromPeriodOne) {
  const auto d = two_point();
  const auto pol = make_constant_order(d, 0.5);
  const auto ex = evaluate_policy(*pol, d, 1, 1, 2, 6, true);
  EXPECT_NEAR(ex.mean, 6 * stationary_cost(d, 1, 1, 0.5, pol->supremum()), 1e-9);
  const auto mc = simulate(*pol, d, 1, 1, 2, 6, 20'000, 42);
  EXPECT_NEAR(mc.mean, ex.mean, 5 * mc.std_error);
}

TEST(Simulate, ThreadCountDoesNotChangeResult) {
  const auto d = two_point();
  const auto pol = make_base_stock(3, d);
  const auto a = simulate(*pol, d, 4, 1, 2, 8, 2000, 99, 1);
  const auto b = simulate(*pol, d, 4, 1, 2, 8, 2000, 99, 4);
  EXPECT_DOUBLE_EQ(a.mean, b.mean);
  EXPECT_DOUBLE_EQ(a.std_error, b.std_error);
}

TEST(Simulate, LongRunPerPeriodCost) {
  const auto d = two_point();
  const auto pol = make_constant_order(d, 0.5);
  const auto run = simulate_long_run(*pol, d, 1, 1, 1, 50'000, 5);
  EXPECT_NEAR(run.per_period_mean, stationary_cost(d, 1, 1, 0.5, pol->supremum()), 4 * run.std_error);
}
