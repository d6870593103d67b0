#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lostsales/demand.hpp"

namespace lostsales::app {

/// A demand law as written in a config file. Either an explicit pmf
///   {"atoms": [0, 2], "probs": [0.5, 0.5], "unit": "1"}
/// or a truncated family
///   {"family": "geometric", "mean": 5, "tail_mass": 1e-6}
///   {"family": "poisson", "mean": 3, "tail_mass": 1e-9}
struct DemandSpec {
  std::string id;
  nlohmann::json raw;

  DemandDistribution build() const;
};

DemandSpec parse_demand(const nlohmann::json& j, const std::string& fallback_id);

/// Everything a subcommand may read. Missing keys take the defaults below.
struct ExperimentConfig {
  DemandSpec demand;
  double c = 1;
  double h = 1;
  std::int64_t L = 4;
  std::int64_t T = 12;
  std::vector<double> eps{0.5};
  std::vector<double> rates{0.5};
  std::int64_t reps = 10'000;
  std::int64_t samples = 100'000;
  std::uint64_t seed = 20240601;
  std::filesystem::path out = "out";
  int threads = 1;

  // ratio-table grid
  std::vector<std::int64_t> L_grid{4};
  std::vector<double> ch_grid{1, 4, 9, 19};
  std::vector<DemandSpec> demand_grid;

  // policy used by simulate: {"kind": "constant" | "best_constant" |
  // "base_stock" | "dp_table" | "zero", "r": .., "S": .., "path": ..}
  nlohmann::json policy;

  // subcommand knobs
  double z_step = 0;            // <= 0 means a quarter lattice unit
  std::int64_t order_cap = -1;
  std::int64_t inventory_cap = -1;
  std::int64_t state_budget = 40'000'000;
  double tail_tol = 1e-6;
  bool exact = true;            // simulate: exact evaluation when possible
  bool save_table = false;      // dp: write the value table artifact
  std::int64_t trajectory_periods = 0;  // simulate: dump one trajectory of this length

  /// Canonical JSON of the effective configuration (sorted keys).
  nlohmann::json to_json() const;
  /// FNV-1a of to_json().dump(), hex.
  std::string hash() const;
};

/// Defaults: two-point demand {0, 2} w.p. 1/2 with c = h = 1, and truncated
/// geometric and Poisson demand with means {1, 5} as the ratio-table grid.
ExperimentConfig default_config();

/// Throws Error(ConfigError) on unknown keys, wrong types, empty grids,
/// missing referenced files or an invalid demand law.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace lostsales::app
