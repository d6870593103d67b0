#include "lostsales/app/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>

#include "lostsales/app/acceptance.hpp"
#include "lostsales/bounds.hpp"
#include "lostsales/dp.hpp"
#include "lostsales/error.hpp"
#include "lostsales/lindley.hpp"
#include "lostsales/parallel.hpp"
#include "lostsales/policy.hpp"
#include "lostsales/report.hpp"
#include "lostsales/sim.hpp"

namespace lostsales::app {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json fingerprint(const ExperimentConfig& cfg, const DemandDistribution& d, bool with_horizon) {
  if (with_horizon) return instance_fingerprint(d, cfg.c, cfg.h, cfg.L, cfg.T, cfg.seed);
  return instance_fingerprint(d, cfg.c, cfg.h, std::nullopt, std::nullopt, cfg.seed);
}

std::shared_ptr<const Policy> build_policy(const ExperimentConfig& cfg, const DemandDistribution& d,
                                           nlohmann::json& info) {
  const auto kind = cfg.policy.at("kind").get<std::string>();
  info = {{"kind", kind}};
  if (kind == "constant") {
    const double r = cfg.policy.at("r").get<double>();
    info["r"] = r;
    return make_constant_order(d, r);
  }
  if (kind == "best_constant") {
    auto zs = best_constant_z(d, cfg.c, cfg.h, cfg.z_step);
    info["r"] = zs.z;
    return make_constant_order(d, zs.z, std::move(zs.sup));
  }
  if (kind == "base_stock") {
    const double s = cfg.policy.at("S").get<double>();
    info["S"] = s;
    return make_base_stock(s, d);
  }
  if (kind == "dp_table") {
    const auto path = cfg.policy.at("path").get<std::string>();
    auto table = load_table(path);
    if (table->L != cfg.L || table->T != cfg.T) {
      throw Error(ErrorCode::ConfigError, "value table was solved for L=" + std::to_string(table->L) +
                                              ", T=" + std::to_string(table->T));
    }
    if (table->demand_fingerprint != d.fingerprint() || table->c != cfg.c || table->h != cfg.h) {
      throw Error(ErrorCode::ConfigError, "value table was solved for another instance");
    }
    info["path"] = path;
    info["checksum"] = table->checksum();
    return std::make_shared<TabularPolicy>(std::move(table));
  }
  return std::make_shared<ZeroPolicy>();
}

DPConfig dp_config(const ExperimentConfig& cfg, std::int64_t L, std::int64_t T, int threads) {
  DPConfig dc;
  dc.L = L;
  dc.T = T;
  dc.order_cap = cfg.order_cap;
  dc.inventory_cap = cfg.inventory_cap;
  dc.state_budget = cfg.state_budget;
  dc.threads = threads;
  return dc;
}

// run-dependent fields are kept in the manifest, not in the byte-stable outputs
nlohmann::json without_seconds(nlohmann::json j) {
  j.erase("seconds");
  return j;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BudgetExceeded:
    case ErrorCode::StateBudgetExceeded:
    case ErrorCode::CapTooTight:
    case ErrorCode::NoConvergence:
      return kBudgetExceeded;
    case ErrorCode::RStarDegenerate:
      return kVerificationFailure;
    default:
      return kConfigError;
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"constants",   "lindley", "z-search",    "dp",    "simulate",
                                              "lower-bound", "gap",     "ratio-table", "verify"};
  return names;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  if (name == "constants") return cmd_constants(cfg, m, log);
  if (name == "lindley") return cmd_lindley(cfg, m, log);
  if (name == "z-search") return cmd_z_search(cfg, m, log);
  if (name == "dp") return cmd_dp(cfg, m, log);
  if (name == "simulate") return cmd_simulate(cfg, m, log);
  if (name == "lower-bound") return cmd_lower_bound(cfg, m, log);
  if (name == "gap") return cmd_gap(cfg, m, log);
  if (name == "ratio-table") return cmd_ratio_table(cfg, m, log);
  if (name == "verify") return cmd_verify(cfg, m, log);
  throw Error(ErrorCode::ConfigError, "unknown subcommand '" + name + "'");
}

int cmd_constants(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto d = cfg.demand.build();
  const auto rep = compute_constants(d, cfg.c, cfg.h, cfg.rates, cfg.eps);
  nlohmann::json certs = nlohmann::json::array();
  for (double e : cfg.eps) certs.push_back(theorem1_certificate(d, cfg.c, cfg.h, cfg.L, cfg.T, e));
  nlohmann::json j = {{"instance", fingerprint(cfg, d, true)},
                      {"demand", describe(d)},
                      {"newsvendor", newsvendor(d, cfg.c, cfg.h)},
                      {"constants", rep},
                      {"certificates", certs}};
  m.write_json("constants.json", j);
  m.time("constants", since(t0));
  log << "m = " << rep.m << ", Q = " << rep.q << ", g = " << rep.g << ", z = " << rep.z << "\n";
  for (const auto& y : rep.y) log << "y(" << y.eps << ") = " << y.value << " (" << y.binding << ")\n";
  return kSuccess;
}

int cmd_lindley(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  const auto d = cfg.demand.build();
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << m.csv_comment("lindley_pmf/v1") << "r,ticks,value,pmf,survival\n";
  bool all_pass = true;
  std::uint64_t idx = 0;
  for (double r : cfg.rates) {
    const auto t0 = Clock::now();
    const auto sup = stationary_waiting(d, r);
    auto s = rng::Stream::child(cfg.seed, "lindley.tail", idx++);
    TailSuiteOptions to;
    to.tail_tol = cfg.tail_tol;
    const auto suite = verify_tail_suite(d, r, cfg.samples, s, to);
    all_pass = all_pass && suite.all_pass();
    nlohmann::json js = sup;
    js.erase("pmf");
    rows.push_back({{"r", r}, {"theta", theta(d, r)}, {"supremum", js}, {"tail_suite", suite}});
    for (std::size_t i = 0; i < sup.pmf.size(); ++i) {
      csv << num(r) << ',' << i << ',' << num(sup.value(i)) << ',' << num(sup.pmf[i]) << ','
          << num(sup.survival[i]) << '\n';
    }
    m.time("rate " + num(r), since(t0));
    log << "r = " << r << ": E[I] = " << sup.mean << ", theta = " << suite.theta
        << ", tail suite " << (suite.all_pass() ? "pass" : "FAIL") << "\n";
  }
  m.write_json("lindley.json", {{"instance", fingerprint(cfg, d, false)}, {"rates", rows}});
  m.write("lindley_pmf.csv", csv.str());
  return all_pass ? kSuccess : kVerificationFailure;
}

int cmd_z_search(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto d = cfg.demand.build();
  const auto zs = best_constant_z(d, cfg.c, cfg.h, cfg.z_step);
  std::ostringstream csv;
  csv << m.csv_comment("z_search/v1") << "v,objective\n";
  for (const auto& p : zs.grid) csv << num(p.v) << ',' << num(p.objective) << '\n';
  m.write_json("z_search.json", {{"instance", fingerprint(cfg, d, false)}, {"result", zs}});
  m.write("z_search.csv", csv.str());
  m.time("z-search", since(t0));
  log << "z = " << zs.z << ", stationary cost " << zs.cost << "\n";
  return kSuccess;
}

int cmd_dp(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  const auto d = cfg.demand.build();
  const auto sol = solve(d, cfg.c, cfg.h, dp_config(cfg, cfg.L, cfg.T, cfg.threads));
  m.time("solve", sol.seconds);
  const auto t0 = Clock::now();
  const auto [residual, gap] = bellman_residual(d, *sol.table, std::max<std::int64_t>(1, sol.states / 200'000));
  const auto nv = newsvendor(d, cfg.c, cfg.h);
  nlohmann::json j = {{"instance", fingerprint(cfg, d, true)},
                      {"solution", without_seconds(sol)},
                      {"T_g", static_cast<double>(cfg.T) * nv.g},
                      {"bellman_residual", residual},
                      {"action_gap", gap}};
  m.write_json("dp.json", j);
  if (cfg.save_table) {
    const auto path = m.out_dir() / "dp_table.lsvt";
    auto tmp = path;
    tmp += ".tmp";
    std::filesystem::create_directories(m.out_dir());
    save_table(*sol.table, tmp.string());
    std::filesystem::rename(tmp, path);
    m.record("dp_table.lsvt");
  }
  m.time("checks", since(t0));
  log << "OPT = " << sol.opt << " over " << sol.states << " states, clip mass " << sol.clip_mass << "\n";
  return kSuccess;
}

int cmd_simulate(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  const auto d = cfg.demand.build();
  nlohmann::json info;
  const auto policy = build_policy(cfg, d, info);
  nlohmann::json j = {{"instance", fingerprint(cfg, d, true)}, {"policy", info}};

  auto t0 = Clock::now();
  const auto mc = simulate(*policy, d, cfg.c, cfg.h, cfg.L, cfg.T, cfg.reps, cfg.seed, cfg.threads);
  m.time("monte_carlo", since(t0));
  j["monte_carlo"] = mc;
  log << policy->name() << ": MC window cost " << mc.mean << " +- " << mc.std_error << "\n";

  if (cfg.exact) {
    t0 = Clock::now();
    const auto ex = evaluate_policy(*policy, d, cfg.c, cfg.h, cfg.L, cfg.T, true, 0, cfg.seed, cfg.threads,
                                    cfg.state_budget);
    m.time("exact", since(t0));
    j["exact"] = ex;
    log << policy->name() << ": exact window cost " << ex.mean << "\n";
  }
  m.write_json("simulate.json", j);

  if (cfg.trajectory_periods > 0) {
    auto ds = rng::Stream::child(cfg.seed, "sim.demand", 0);
    auto ps = rng::Stream::child(cfg.seed, "sim.policy", 0);
    const auto traj = run_trajectory(*policy, d, cfg.c, cfg.h, cfg.L, cfg.T, ds, ps, cfg.trajectory_periods);
    m.write("trajectory.csv", m.csv_comment("trajectory/v1") + traj.to_csv());
  }
  return kSuccess;
}

int cmd_lower_bound(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto d = cfg.demand.build();
  auto s = rng::Stream::child(cfg.seed, "lower_bound", 0);
  const auto sol = lower_bound_optimize(d, cfg.c, cfg.h, cfg.L, s);
  const auto cap = inventory_cap_check(d, cfg.c, cfg.h, cfg.L, sol);
  const auto margin = rstar_margin_check(d, cfg.c, cfg.h, cfg.L, sol);
  m.write_json("lower_bound.json", {{"instance", fingerprint(cfg, d, true)},
                                    {"solution", sol},
                                    {"inventory_cap", cap},
                                    {"r_star_margin", margin}});
  m.time("lower-bound", since(t0));
  log << "window lower bound " << sol.objective << ", r* = " << sol.r_star << ", I* = " << sol.I_real() << "\n";
  return cap.pass_scaled ? kSuccess : kVerificationFailure;
}

int cmd_gap(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto d = cfg.demand.build();
  auto s = rng::Stream::child(cfg.seed, "lower_bound", 0);
  const auto sol = lower_bound_optimize(d, cfg.c, cfg.h, cfg.L, s);
  nlohmann::json j = {{"instance", fingerprint(cfg, d, true)}, {"solution", sol}};
  auto gs = rng::Stream::child(cfg.seed, "gap", 0);
  try {
    const auto rep = gap_certificate(d, cfg.c, cfg.h, sol, cfg.samples, gs);
    j["gap"] = rep;
    m.write_json("gap.json", j);
    m.time("gap", since(t0));
    log << "observed gap " << rep.gap.mean << " <= certified " << rep.certified_bound << ": "
        << (rep.pass ? "pass" : "FAIL") << "\n";
    return rep.pass ? kSuccess : kVerificationFailure;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RStarDegenerate) throw;
    j["degenerate"] = e.what();
    m.write_json("gap.json", j);
    log << e.what() << "\n";
    return kVerificationFailure;
  }
}

int cmd_ratio_table(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  struct Cell {
    std::int64_t L;
    double ch;
    std::size_t demand;
  };
  std::vector<Cell> cells;
  for (auto L : cfg.L_grid) {
    for (std::size_t di = 0; di < cfg.demand_grid.size(); ++di) {
      for (double ch : cfg.ch_grid) cells.push_back({L, ch, di});
    }
  }
  std::vector<DemandDistribution> demands;
  for (const auto& spec : cfg.demand_grid) demands.push_back(spec.build());

  const unsigned workers = resolve_threads(cfg.threads);
  const int inner = workers > 1 ? 1 : cfg.threads;
  std::vector<nlohmann::json> results(cells.size());
  const auto t0 = Clock::now();
  parallel_for(cells.size(), static_cast<int>(workers), [&](std::size_t i) {
    const auto& cell = cells[i];
    const double h = cfg.h;
    const double c = cell.ch * h;
    nlohmann::json row = {{"index", i}, {"L", cell.L}, {"T", cfg.T}, {"c", c}, {"h", h},
                          {"demand_id", cfg.demand_grid[cell.demand].id}};
    try {
      const auto rr = opt_ratio(demands[cell.demand], c, h, dp_config(cfg, cell.L, cfg.T, inner), cfg.z_step);
      row["status"] = "ok";
      row["opt"] = rr.opt;
      row["cost_pi_z"] = rr.cost_pi_z;
      row["ratio"] = rr.ratio;
      row["z"] = rr.z;
      row["states"] = rr.dp.states;
      row["clip_mass"] = rr.dp.clip_mass;
    } catch (const Error& e) {
      row["status"] = std::string(to_string(e.code()));
      row["error"] = e.what();
    }
    char name[32];
    std::snprintf(name, sizeof name, "cells/cell_%04zu.json", i);
    write_atomic(m.out_dir() / name, row.dump(2) + "\n");
    results[i] = std::move(row);
  });
  m.time("ratio-table", since(t0));

  std::ostringstream csv;
  csv << m.csv_comment("ratio_table/v1") << "L,T,c,h,demand_id,OPT,cost_pi_z,ratio,z,status\n";
  std::int64_t ok = 0, le2 = 0, le133 = 0, le112 = 0;
  for (const auto& row : results) {
    const bool good = row.at("status") == "ok";
    csv << row.at("L").get<std::int64_t>() << ',' << row.at("T").get<std::int64_t>() << ','
        << num(row.at("c").get<double>()) << ',' << num(row.at("h").get<double>()) << ','
        << row.at("demand_id").get<std::string>() << ',';
    if (good) {
      const double ratio = row.at("ratio").get<double>();
      csv << num(row.at("opt").get<double>()) << ',' << num(row.at("cost_pi_z").get<double>()) << ','
          << num(ratio) << ',' << num(row.at("z").get<double>()) << ",ok\n";
      ++ok;
      le2 += ratio <= 2.0 ? 1 : 0;
      le133 += ratio <= 1.33 ? 1 : 0;
      le112 += ratio <= 1.12 ? 1 : 0;
    } else {
      csv << ",,,," << row.at("status").get<std::string>() << '\n';
    }
  }
  const auto frac = [&](std::int64_t n) { return ok ? static_cast<double>(n) / static_cast<double>(ok) : 0.0; };
  std::ostringstream summary;
  summary << m.csv_comment("ratio_table_summary/v1") << "threshold,count,cells,fraction\n";
  summary << "2," << le2 << ',' << ok << ',' << num(frac(le2)) << '\n';
  summary << "1.33," << le133 << ',' << ok << ',' << num(frac(le133)) << '\n';
  summary << "1.12," << le112 << ',' << ok << ',' << num(frac(le112)) << '\n';

  m.write("ratio_table.csv", csv.str());
  m.write("ratio_table_summary.csv", summary.str());
  m.write_json("ratio_table.json",
               {{"cells", results},
                {"failed_cells", static_cast<std::int64_t>(results.size()) - ok},
                {"fractions", {{"le_2", frac(le2)}, {"le_1.33", frac(le133)}, {"le_1.12", frac(le112)}}}});
  log << ok << "/" << results.size() << " cells solved; ratio <= 2: " << frac(le2) << ", <= 1.33: " << frac(le133)
      << ", <= 1.12: " << frac(le112) << "\n";
  return kSuccess;
}

int cmd_verify(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log) {
  AcceptanceOptions opts;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  const auto results = run_acceptance(opts, &log);
  auto j = to_json(results);
  double total = 0;
  for (const auto& r : results) {
    m.time("criterion " + std::to_string(r.id), r.seconds);
    total += r.seconds;
  }
  m.write_json("verify.json", j);
  log << (j.at("all_pass").get<bool>() ? "all criteria pass" : "some criteria FAIL") << " (" << total << " s)\n";
  return j.at("all_pass").get<bool>() ? kSuccess : kVerificationFailure;
}

}  // namespace lostsales::app
