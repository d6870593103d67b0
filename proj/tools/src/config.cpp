#include "lostsales/app/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lostsales/error.hpp"
#include "lostsales/rational.hpp"
#include "lostsales/rng.hpp"

namespace lostsales::app {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(std::string("key '") + key + "' has the wrong type");
  }
}

template <class T>
std::vector<T> get_grid(const nlohmann::json& j, const char* key, std::vector<T> fallback) {
  auto v = get<std::vector<T>>(j, key, std::move(fallback));
  if (v.empty()) fail(std::string("grid '") + key + "' is empty");
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json family_spec(const char* family, double mean) {
  return {{"family", family}, {"mean", mean}, {"tail_mass", 1e-6}};
}

}  // namespace

DemandDistribution DemandSpec::build() const {
  try {
    if (raw.contains("family")) {
      reject_unknown(raw, {"id", "family", "p", "mean", "tail_mass"}, "demand '" + id + "'");
      const auto family = raw.at("family").get<std::string>();
      const double tail = get<double>(raw, "tail_mass", 1e-6);
      if (family == "geometric") {
        double p = get<double>(raw, "p", 0.0);
        if (raw.contains("mean")) {
          const double mean = raw.at("mean").get<double>();
          if (!(mean > 0)) fail("geometric mean must be positive");
          p = 1.0 / (1.0 + mean);
        }
        return truncate_geometric(p, tail);
      }
      if (family == "poisson") return truncate_poisson(get<double>(raw, "mean", 0.0), tail);
      fail("unknown demand family '" + family + "'");
    }
    reject_unknown(raw, {"id", "atoms", "probs", "unit"}, "demand '" + id + "'");
    if (!raw.contains("atoms") || !raw.contains("probs")) fail("demand needs atoms and probs, or a family");
    Rational unit(1);
    if (raw.contains("unit")) {
      const auto& u = raw.at("unit");
      unit = u.is_string() ? parse_rational(u.get<std::string>())
                           : parse_rational(std::to_string(u.get<double>()));
    }
    return DemandDistribution::from_pmf(raw.at("atoms").get<std::vector<std::int64_t>>(),
                                        raw.at("probs").get<std::vector<double>>(), unit);
  } catch (const nlohmann::json::exception& e) {
    fail("demand '" + id + "': " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail("demand '" + id + "': " + e.what());
  }
}

DemandSpec parse_demand(const nlohmann::json& j, const std::string& fallback_id) {
  if (!j.is_object()) fail("demand must be an object");
  DemandSpec spec;
  spec.id = get<std::string>(j, "id", fallback_id);
  spec.raw = j;
  spec.build();
  return spec;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.demand = parse_demand({{"id", "two_point"}, {"atoms", {0, 2}}, {"probs", {0.5, 0.5}}}, "two_point");
  cfg.demand_grid = {parse_demand(family_spec("geometric", 1.0), "geometric_mean1"),
                     parse_demand(family_spec("geometric", 5.0), "geometric_mean5"),
                     parse_demand(family_spec("poisson", 1.0), "poisson_mean1"),
                     parse_demand(family_spec("poisson", 5.0), "poisson_mean5")};
  cfg.policy = {{"kind", "best_constant"}};
  return cfg;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  reject_unknown(j,
                 {"demand", "c", "h", "L", "T", "eps", "rates", "reps", "samples", "seed", "out",
                  "threads", "L_grid", "ch_grid", "demand_grid", "policy", "z_step", "order_cap",
                  "inventory_cap", "state_budget", "tail_tol", "exact", "save_table",
                  "trajectory_periods"},
                 "config");
  ExperimentConfig cfg = default_config();
  if (j.contains("demand")) cfg.demand = parse_demand(j.at("demand"), "demand");
  cfg.c = get(j, "c", cfg.c);
  cfg.h = get(j, "h", cfg.h);
  cfg.L = get(j, "L", cfg.L);
  cfg.T = get(j, "T", cfg.T);
  cfg.eps = get_grid(j, "eps", cfg.eps);
  cfg.rates = get_grid(j, "rates", cfg.rates);
  cfg.reps = get(j, "reps", cfg.reps);
  cfg.samples = get(j, "samples", cfg.samples);
  cfg.seed = get(j, "seed", cfg.seed);
  cfg.out = get<std::string>(j, "out", cfg.out.string());
  cfg.threads = get(j, "threads", cfg.threads);
  cfg.L_grid = get_grid(j, "L_grid", cfg.L_grid);
  cfg.ch_grid = get_grid(j, "ch_grid", cfg.ch_grid);
  if (j.contains("demand_grid")) {
    const auto& grid = j.at("demand_grid");
    if (!grid.is_array() || grid.empty()) fail("grid 'demand_grid' is empty");
    cfg.demand_grid.clear();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      cfg.demand_grid.push_back(parse_demand(grid[i], "demand" + std::to_string(i)));
    }
  }
  if (j.contains("policy")) cfg.policy = j.at("policy");
  cfg.z_step = get(j, "z_step", cfg.z_step);
  cfg.order_cap = get(j, "order_cap", cfg.order_cap);
  cfg.inventory_cap = get(j, "inventory_cap", cfg.inventory_cap);
  cfg.state_budget = get(j, "state_budget", cfg.state_budget);
  cfg.tail_tol = get(j, "tail_tol", cfg.tail_tol);
  cfg.exact = get(j, "exact", cfg.exact);
  cfg.save_table = get(j, "save_table", cfg.save_table);
  cfg.trajectory_periods = get(j, "trajectory_periods", cfg.trajectory_periods);

  if (!(cfg.c > 0) || !(cfg.h > 0)) fail("c and h must be positive");
  if (cfg.L < 1) fail("L must be at least 1");
  if (cfg.T < 1) fail("T must be at least 1");
  if (cfg.reps < 1 || cfg.samples < 1) fail("reps and samples must be positive");
  for (auto L : cfg.L_grid) {
    if (L < 1) fail("L_grid entries must be at least 1");
  }
  for (auto ch : cfg.ch_grid) {
    if (!(ch > 0)) fail("ch_grid entries must be positive");
  }

  if (!cfg.policy.is_object() || !cfg.policy.contains("kind")) fail("policy needs a 'kind'");
  const auto kind = get<std::string>(cfg.policy, "kind", "");
  if (kind == "constant") {
    reject_unknown(cfg.policy, {"kind", "r"}, "policy");
    if (!cfg.policy.contains("r")) fail("constant policy needs 'r'");
  } else if (kind == "base_stock") {
    reject_unknown(cfg.policy, {"kind", "S"}, "policy");
    if (!cfg.policy.contains("S")) fail("base_stock policy needs 'S'");
  } else if (kind == "dp_table") {
    reject_unknown(cfg.policy, {"kind", "path"}, "policy");
    const auto path = get<std::string>(cfg.policy, "path", "");
    if (path.empty() || !std::filesystem::exists(path)) fail("dp_table file '" + path + "' does not exist");
  } else if (kind == "best_constant" || kind == "zero") {
    reject_unknown(cfg.policy, {"kind"}, "policy");
  } else {
    fail("unknown policy kind '" + kind + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    fail("config '" + path.string() + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& g : demand_grid) {
    auto raw = g.raw;
    raw["id"] = g.id;
    grid.push_back(raw);
  }
  auto dem = demand.raw;
  dem["id"] = demand.id;
  return {
      {"demand", dem},
      {"c", c},
      {"h", h},
      {"L", L},
      {"T", T},
      {"eps", eps},
      {"rates", rates},
      {"reps", reps},
      {"samples", samples},
      {"seed", seed},
      {"threads", threads},
      {"L_grid", L_grid},
      {"ch_grid", ch_grid},
      {"demand_grid", grid},
      {"policy", policy},
      {"z_step", z_step},
      {"order_cap", order_cap},
      {"inventory_cap", inventory_cap},
      {"state_budget", state_budget},
      {"tail_tol", tail_tol},
      {"exact", exact},
      {"save_table", save_table},
      {"trajectory_periods", trajectory_periods},
  };
}

std::string ExperimentConfig::hash() const {
  // threads and the output directory do not change results and are left out
  auto j = to_json();
  j.erase("threads");
  return hex64(rng::fnv1a64(j.dump()));
}

}  // namespace lostsales::app
