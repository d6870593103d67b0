#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lostsales/app/oracles.hpp"
#include "lostsales/demand.hpp"
#include "lostsales/dp.hpp"
#include "lostsales/error.hpp"
#include "lostsales/policy.hpp"

using namespace lostsales;

namespace {

DemandDistribution two_point() { return DemandDistribution::from_pmf({0, 2}, {0.5, 0.5}); }
DemandDistribution three_point() { return DemandDistribution::from_pmf({0, 1, 2}, {0.3, 0.4, 0.3}); }

DPConfig config(std::int64_t L, std::int64_t T) {
  DPConfig cfg;
  cfg.L = L;
  cfg.T = T;
  return cfg;
}

}  // namespace

class BruteForce : public ::testing::TestWithParam<double> {};

TEST_P(BruteForce, TwoPointL1T3) {
  const double c = GetParam();
  const auto d = two_point();
  const auto sol = solve(d, c, 1, config(1, 3));
  EXPECT_NEAR(sol.opt, oracle::brute_force_policy_tree(d, c, 1, 1, 3, 4), 1e-9);
}

TEST_P(BruteForce, ThreePointL1T2) {
  const double c = GetParam();
  const auto d = three_point();
  const auto sol = solve(d, c, 1, config(1, 2));
  EXPECT_NEAR(sol.opt, oracle::brute_force_policy_tree(d, c, 1, 1, 2, 4), 1e-9);
}

TEST_P(BruteForce, ThreePointL2T3) {
  const double c = GetParam();
  const auto d = three_point();
  const auto sol = solve(d, c, 1, config(2, 3));
  EXPECT_NEAR(sol.opt, oracle::brute_force_policy_tree(d, c, 1, 2, 3, 2, 400'000'000), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(CostRatios, BruteForce, ::testing::Values(1.0, 4.0, 9.0));

TEST(DP, FloorAndConstantOrderBracketOpt) {
  for (double c : {1.0, 4.0, 9.0}) {
    const auto d = three_point();
    const auto sol = solve(d, c, 1, config(2, 6));
    EXPECT_GE(sol.opt, 6 * newsvendor(d, c, 1).g * (1 - 1e-12));
    EXPECT_LE(sol.opt, 6 * best_constant_z(d, c, 1).cost * (1 + 1e-12));
    EXPECT_EQ(sol.clip_mass, 0.0);
  }
}

TEST(DP, ForwardPassAndBellmanResidual) {
  const auto d = three_point();
  const auto sol = solve(d, 4, 1, config(3, 6));
  const auto fwd = forward_table(d, *sol.table);
  EXPECT_NEAR(fwd.cost, sol.opt, 1e-9);
  const auto [res, gap] = bellman_residual(d, *sol.table);
  EXPECT_LE(res, 1e-9);
  EXPECT_LE(gap, 1e-9);
}

TEST(DP, CorruptedTableIsCaughtByResidual) {
  const auto d = three_point();
  const auto sol = solve(d, 4, 1, config(2, 5));
  auto broken = *sol.table;
  broken.values[1][broken.index(2, {1})] += 0.5;
  EXPECT_GT(bellman_residual(d, broken).first, 0.1);
}

TEST(DP, TabularPolicyReproducesOpt) {
  const auto d = three_point();
  const auto sol = solve(d, 9, 1, config(2, 5));
  TabularPolicy pol(sol.table);
  const auto ex = evaluate_policy(pol, d, 9, 1, 2, 5, true);
  EXPECT_NEAR(ex.mean, sol.opt, 1e-9);
}

TEST(DP, ThreadsGiveIdenticalTables) {
  const auto d = three_point();
  auto cfg = config(3, 6);
  const auto a = solve(d, 4, 1, cfg);
  cfg.threads = 4;
  const auto b = solve(d, 4, 1, cfg);
  EXPECT_EQ(a.table->checksum(), b.table->checksum());
}

TEST(DP, CapDoublingIsStable) {
  const auto d = three_point();
  const auto base = solve(d, 9, 1, config(2, 5));
  auto cfg = config(2, 5);
  cfg.order_cap = 2 * base.table->order_cap;
  cfg.inventory_cap = 2 * base.table->inventory_cap;
  const auto big = solve(d, 9, 1, cfg);
  EXPECT_LT(std::abs(big.opt - base.opt) / base.opt, 1e-6);
}

TEST(DP, StateBudget) {
  auto cfg = config(4, 8);
  cfg.state_budget = 10;
  try {
    solve(three_point(), 9, 1, cfg);
    FAIL() << "expected StateBudgetExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StateBudgetExceeded);
  }
}

TEST(DP, TableRoundTrip) {
  const auto d = three_point();
  const auto sol = solve(d, 4, 1, config(2, 4));
  const auto path = (std::filesystem::temp_directory_path() / "lostsales_test_table.lsvt").string();
  save_table(*sol.table, path);
  const auto back = load_table(path);
  EXPECT_EQ(back->checksum(), sol.table->checksum());
  EXPECT_DOUBLE_EQ(back->opt, sol.opt);

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    f.put('\x7f');
  }
  EXPECT_THROW(load_table(path), Error);
  std::filesystem::remove(path);
}

TEST(Ratio, ConstantOrderWithinTwo) {
  const auto d = truncate_geometric(0.5, 1e-6);
  for (double c : {1.0, 9.0}) {
    const auto rr = opt_ratio(d, c, 1, config(3, 6));
    EXPECT_GE(rr.ratio, 1 - 1e-12);
    EXPECT_LE(rr.ratio, 2.0);
    EXPECT_NEAR(rr.ratio, rr.cost_pi_z / rr.opt, 1e-15);
  }
}
