#include "lostsales/report.hpp"

#include <cmath>
#include <limits>

namespace lostsales {

namespace {

// NaN and infinities have no JSON spelling; they are written as null.
nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

nlohmann::json instance_fingerprint(const DemandDistribution& d, double c, double h,
                                    std::optional<std::int64_t> L, std::optional<std::int64_t> T,
                                    std::optional<std::uint64_t> seed) {
  nlohmann::json j = {
      {"demand_hash", d.fingerprint()},
      {"demand", d.label()},
      {"unit", d.unit().str()},
      {"c", c},
      {"h", h},
  };
  if (L) j["L"] = *L;
  if (T) j["T"] = *T;
  if (seed) j["seed"] = *seed;
  return j;
}

nlohmann::json describe(const DemandDistribution& d) {
  return {
      {"label", d.label()},
      {"unit", d.unit().str()},
      {"atoms", std::vector<std::int64_t>(d.atoms().begin(), d.atoms().end())},
      {"probs", std::vector<double>(d.probs().begin(), d.probs().end())},
      {"mean", d.mean()},
      {"second_moment", d.second_moment()},
      {"sigma", d.sigma()},
      {"zeta", d.zeta()},
      {"truncated_mass", d.truncated_mass()},
  };
}

void to_json(nlohmann::json& j, const NewsvendorScalars& v) {
  j = {{"Q", v.q}, {"Q_lattice", v.q_lattice}, {"g", v.g}};
}

void to_json(nlohmann::json& j, const SupremumSolution& v) {
  j = {
      {"r", v.r},
      {"rate_lattice", v.lattice.rate.str()},
      {"ticks_per_unit", v.lattice.scale},
      {"tick", v.lattice.tick},
      {"mean", v.mean},
      {"second_moment", v.second_moment},
      {"residual", v.residual},
      {"iterations", v.iterations},
      {"support", v.pmf.size()},
      {"pmf", v.pmf},
  };
}

void to_json(nlohmann::json& j, const ArgmaxDistribution& v) {
  j = {
      {"r", v.r},
      {"theta", v.theta},
      {"horizon", v.horizon},
      {"tail_bound", v.tail_bound},
      {"samples", v.samples},
      {"pmf", v.pmf},
  };
}

void to_json(nlohmann::json& j, const BoundCheck& v) {
  j = {
      {"bound_name", v.bound_name},
      {"bound_value", num(v.bound_value)},
      {"estimate", num(v.estimate)},
      {"std_error", num(v.std_error)},
      {"pass", v.pass},
  };
}

void to_json(nlohmann::json& j, const TailSuiteReport& v) {
  j = {{"r", v.r}, {"theta", v.theta}, {"horizon", v.horizon}, {"all_pass", v.all_pass()},
       {"checks", v.checks}};
}

void to_json(nlohmann::json& j, const ZSearchResult& v) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& p : v.grid) grid.push_back({{"v", p.v}, {"objective", p.objective}});
  j = {
      {"z", v.z},
      {"objective", v.objective},
      {"stationary_cost", v.cost},
      {"grid_step", v.grid_step},
      {"mean_inventory", v.sup.mean},
      {"grid", grid},
  };
}

void to_json(nlohmann::json& j, const CostSummary& v) {
  j = {{"mean", v.mean}, {"stderr", v.std_error}, {"reps", v.reps},
       {"window", {v.window_lo, v.window_hi}}};
}

void to_json(nlohmann::json& j, const LongRunSummary& v) {
  j = {{"per_period_mean", v.per_period_mean}, {"stderr", v.std_error}, {"batches", v.batches},
       {"periods", v.periods}};
}

void to_json(nlohmann::json& j, const WindowCost& v) {
  j = {{"value", v.value}, {"stderr", v.std_error}, {"exact", v.exact}, {"holding", v.holding},
       {"shortage", v.shortage}};
}

void to_json(nlohmann::json& j, const DPSolution& v) {
  j = {
      {"opt", v.opt},
      {"states", v.states},
      {"clip_mass", v.clip_mass},
      {"seconds", v.seconds},
      {"order_grid", "demand lattice"},
  };
  if (v.table) {
    j["L"] = v.table->L;
    j["T"] = v.table->T;
    j["order_cap"] = v.table->order_cap;
    j["inventory_cap"] = v.table->inventory_cap;
    j["first_orders"] = v.table->first_orders;
    j["checksum"] = v.table->checksum();
  }
}

void to_json(nlohmann::json& j, const PolicyEvaluation& v) {
  j = {{"mean", v.mean}, {"stderr", v.std_error}, {"exact", v.exact}, {"reps", v.reps},
       {"peak_states", v.peak_states}};
}

void to_json(nlohmann::json& j, const RatioResult& v) {
  j = {{"opt", v.opt}, {"cost_pi_z", v.cost_pi_z}, {"ratio", v.ratio}, {"z", v.z}, {"dp", v.dp}};
}

void to_json(nlohmann::json& j, const ThresholdY& v) {
  j = {{"eps", v.eps}, {"y", num(v.value)}, {"linear_term", num(v.linear_term)},
       {"quadratic_term", num(v.quadratic_term)}, {"binding", v.binding}};
}

void to_json(nlohmann::json& j, const Theorem1Certificate& v) {
  j = {
      {"eps", v.eps},
      {"L", v.L},
      {"T", v.T},
      {"y", v.y},
      {"required_L", num(v.required_L)},
      {"required_T", num(v.required_T)},
      {"L_ok", v.L_ok},
      {"T_ok", v.T_ok},
      {"hypotheses_met", v.hypotheses_met},
      {"promised_ratio", num(v.promised_ratio)},
      {"desk_reproducible", v.desk_reproducible},
      {"statement", v.statement},
  };
}

void to_json(nlohmann::json& j, const LowerBoundSolution& v) {
  j = {
      {"L", v.L},
      {"x", v.x_real()},
      {"inventory", v.I_real()},
      {"objective", v.objective},
      {"r_star", v.r_star},
      {"r_star_below_mean", v.r_star_below_mean},
      {"telemetry",
       {{"exhaustive", v.exhaustive},
        {"evaluations", v.evaluations},
        {"starts", v.starts},
        {"sweeps", v.sweeps},
        {"second_best", v.second_best},
        {"inventory_box", static_cast<double>(v.inventory_box) * v.unit},
        {"inventory_on_boundary", v.inventory_on_boundary},
        {"seed", v.seed}}},
  };
}

void to_json(nlohmann::json& j, const Estimate& v) { j = {{"mean", v.mean}, {"stderr", v.std_error}}; }

void to_json(nlohmann::json& j, const CoupledEstimates& v) {
  j = {
      {"samples", v.samples},
      {"violations", v.violations},
      {"direct_lower_bound", v.direct},
      {"refined_lower_bound", v.refined},
      {"pi_rstar", v.pi_rstar},
      {"gap", v.gap},
      {"final_inventory", v.final_inventory},
      {"mean_argmax", v.mean_argmax},
  };
}

void to_json(nlohmann::json& j, const GapReport& v) {
  j = {
      {"r_star", v.r_star},
      {"theta", v.theta},
      {"Q", v.q},
      {"inventory", v.inventory},
      {"lower_bound_exact", v.lower_bound_exact},
      {"pi_rstar_exact", v.pi_rstar_exact},
      {"pi_rstar", v.pi_rstar},
      {"refined_lower_bound", v.refined},
      {"direct_lower_bound", v.direct},
      {"observed_gap", v.gap},
      {"certified_bound", v.certified_bound},
      {"violations", v.violations},
      {"refined_below_pi", v.refined_below_pi},
      {"pass", v.pass},
  };
}

void to_json(nlohmann::json& j, const InventoryCapReport& v) {
  j = {{"inventory", v.inventory}, {"cap_scaled", v.cap_scaled}, {"cap_unscaled", v.cap_unscaled},
       {"pass_scaled", v.pass_scaled}, {"pass_unscaled", v.pass_unscaled}};
}

void to_json(nlohmann::json& j, const RStarMarginReport& v) {
  j = {
      {"L", v.L},
      {"required_L", num(v.required_L)},
      {"hypothesis_met", v.hypothesis_met},
      {"margin", v.margin},
      {"guaranteed_margin", v.guaranteed_margin},
      {"margin_at_least_guaranteed", v.margin_at_least_guaranteed},
      {"r_star_below_mean", v.r_star_below_mean},
      {"note", v.note},
  };
}

void to_json(nlohmann::json& j, const SteinReport& v) {
  j = {{"n", v.n}, {"shift", v.shift}, {"mc_mean", v.mc_mean}, {"mc_stderr", v.mc_std_error},
       {"normal_mean", v.normal_mean}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"pass", v.pass}};
}

void to_json(nlohmann::json& j, const NormalConstantReport& v) {
  j = {{"expectation", v.expectation}, {"reciprocal", v.reciprocal}, {"pass", v.pass}};
}

void to_json(nlohmann::json& j, const ConstantsReport& v) {
  nlohmann::json thetas = nlohmann::json::array();
  for (const auto& [r, t] : v.theta) thetas.push_back({{"r", r}, {"theta", t}});
  j = {
      {"mean", v.mean},
      {"sigma", v.sigma},
      {"zeta", v.zeta},
      {"Q", v.q},
      {"g", v.g},
      {"z", v.z},
      {"m", v.m},
      {"theta", thetas},
      {"y", v.y},
  };
}

}  // namespace lostsales
