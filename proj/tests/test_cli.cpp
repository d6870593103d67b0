#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lostsales/app/commands.hpp"
#include "lostsales/app/config.hpp"
#include "lostsales/app/manifest.hpp"
#include "lostsales/error.hpp"

using namespace lostsales;
using namespace lostsales::app;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("lostsales_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ErrorCode config_error(const nlohmann::json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::BadParameter;
}

int run(const std::string& cmd, const ExperimentConfig& cfg, const std::filesystem::path& out) {
  RunManifest m(cmd, cfg.hash(), cfg.seed, out);
  std::ostringstream log;
  const int rc = run_command(cmd, cfg, m, log);
  m.finish(rc);
  return rc;
}

}  // namespace

TEST(Config, RejectsBadInput) {
  EXPECT_EQ(config_error({{"cc", 1}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error({{"eps", nlohmann::json::array()}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error({{"c", -1}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error({{"demand", {{"atoms", {0, 1}}, {"probs", {0.2, 0.2}}}}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error({{"policy", {{"kind", "dp_table"}, {"path", "/nonexistent/table.lsvt"}}}}),
            ErrorCode::ConfigError);
  EXPECT_EQ(config_error({{"policy", {{"kind", "magic"}}}}), ErrorCode::ConfigError);
}

TEST(Config, FamiliesAndHash) {
  const auto cfg = parse_config({{"demand", {{"family", "geometric"}, {"mean", 1}}}, {"c", 4}});
  EXPECT_NEAR(cfg.demand.build().mean(), 1.0, 1e-4);
  auto other = cfg;
  other.threads = 8;
  EXPECT_EQ(cfg.hash(), other.hash());
  other.seed += 1;
  EXPECT_NE(cfg.hash(), other.hash());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorCode::ConfigError), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::NonStochastic), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::StateBudgetExceeded), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::BudgetExceeded), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::RStarDegenerate), 1);
}

TEST(Cli, ConstantsAreByteStable) {
  auto cfg = default_config();
  cfg.eps = {0.1, 0.5};
  const auto a = scratch("const_a"), b = scratch("const_b");
  ASSERT_EQ(run("constants", cfg, a), 0);
  ASSERT_EQ(run("constants", cfg, b), 0);
  const auto ja = slurp(a / "constants.json");
  EXPECT_EQ(ja, slurp(b / "constants.json"));
  const auto j = nlohmann::json::parse(ja);
  EXPECT_EQ(j["constants"]["m"].get<double>(), 16900.0);
  EXPECT_EQ(j["constants"]["y"].size(), 2u);
  EXPECT_EQ(j["run"]["seed"].get<std::uint64_t>(), cfg.seed);
  EXPECT_EQ(j["run"]["config_hash"].get<std::string>(), cfg.hash());

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["outputs"][0]["fnv1a64"].get<std::string>(), checksum_hex(ja));
}

TEST(Cli, DpAndSimulateAreByteStable) {
  auto cfg = parse_config({{"c", 4}, {"L", 2}, {"T", 5}, {"reps", 500}});
  const auto a = scratch("dp_a"), b = scratch("dp_b");
  ASSERT_EQ(run("dp", cfg, a), 0);
  ASSERT_EQ(run("dp", cfg, b), 0);
  EXPECT_EQ(slurp(a / "dp.json"), slurp(b / "dp.json"));
  ASSERT_EQ(run("simulate", cfg, a), 0);
  ASSERT_EQ(run("simulate", cfg, b), 0);
  EXPECT_EQ(slurp(a / "simulate.json"), slurp(b / "simulate.json"));
}

TEST(Cli, RatioTableSchema) {
  auto cfg = parse_config({{"L_grid", {1, 2}},
                           {"T", 4},
                           {"ch_grid", {1, 4}},
                           {"demand_grid", {{{"id", "tp"}, {"atoms", {0, 2}}, {"probs", {0.5, 0.5}}}}}});
  const auto out = scratch("ratio");
  ASSERT_EQ(run("ratio-table", cfg, out), 0);
  std::istringstream csv(slurp(out / "ratio_table.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# ratio_table/v1", 0), 0u);
  std::getline(csv, line);
  EXPECT_EQ(line, "L,T,c,h,demand_id,OPT,cost_pi_z,ratio,z,status");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 10u);
    EXPECT_EQ(f[9], "ok");
    const double opt = std::stod(f[5]), cost = std::stod(f[6]), ratio = std::stod(f[7]);
    EXPECT_NEAR(ratio, cost / opt, 1e-12);
    EXPECT_GE(ratio, 1 - 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(std::filesystem::exists(out / "ratio_table_summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(out / "cells" / "cell_0003.json"));
}

TEST(Cli, GapReportsDegeneracyAsVerificationFailure) {
  auto cfg = parse_config({{"c", 9}, {"L", 2}, {"samples", 100}});
  EXPECT_EQ(run("gap", cfg, scratch("gap")), 1);
}
