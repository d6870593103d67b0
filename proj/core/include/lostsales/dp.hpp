#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/policy.hpp"
#include "lostsales/rational.hpp"

namespace lostsales {

struct DPConfig {
  std::int64_t L = 1;
  std::int64_t T = 2;
  std::int64_t order_cap = -1;       // lattice units; < 0 selects Q
  std::int64_t inventory_cap = -1;   // cap on I + x1, lattice units; < 0 selects Q (L + 2)
  std::int64_t state_budget = 40'000'000;
  double clip_threshold = 1e-7;      // CapTooTight above this clipped mass
  int threads = 1;
};

/// Optimal cost-to-go and actions for periods L+1, ..., T+L.
///
/// Before period L+1 nothing arrives and nothing is charged, so the state at
/// period t >= L+1 is summarised by y = I_t + x_{1,t} together with
/// (x_{2,t}, ..., x_{L,t}). States are indexed y * R + digits, where the
/// pipeline digits are base order_cap + 1 with x_2 most significant and
/// R = (order_cap + 1)^(L-1).
struct ValueTable {
  std::int64_t L = 1;
  std::int64_t T = 2;
  std::int64_t order_cap = 0;
  std::int64_t inventory_cap = 0;
  Rational unit{1};
  double c = 1;
  double h = 1;
  std::uint64_t demand_fingerprint = 0;
  double opt = 0;
  std::vector<std::int64_t> first_orders;        // periods 1..L
  std::vector<std::vector<double>> values;       // [t - (L+1)][state]
  std::vector<std::vector<std::uint16_t>> actions;  // [t - (L+1)][state], t <= T

  std::int64_t radix() const noexcept { return order_cap + 1; }
  std::int64_t rest_size() const noexcept;
  std::int64_t state_count() const noexcept { return (inventory_cap + 1) * rest_size(); }
  /// rest holds x_2..x_L.
  std::int64_t index(std::int64_t y, const std::vector<std::int64_t>& rest) const;
  double value(std::int64_t t, std::int64_t y, const std::vector<std::int64_t>& rest) const;
  std::int64_t action(std::int64_t t, std::int64_t y, const std::vector<std::int64_t>& rest) const;
  /// FNV-1a over the value and action arrays.
  std::uint64_t checksum() const;
};

struct DPSolution {
  double opt = 0;
  std::shared_ptr<const ValueTable> table;
  double clip_mass = 0;  // probability of hitting the inventory cap under the optimal policy
  std::int64_t states = 0;
  double seconds = 0;
};

/// Backward induction from I = 0, x = 0. Throws StateBudgetExceeded,
/// CapTooTight or BadParameter.
DPSolution solve(const DemandDistribution& d, double c, double h, const DPConfig& cfg);

/// Follows the table from the initial state and returns the exact expected
/// window cost and the clipped probability mass.
struct ForwardResult {
  double cost = 0;
  double clip_mass = 0;
};
ForwardResult forward_table(const DemandDistribution& d, const ValueTable& table);

/// Largest deviation between a stored value and a fresh one-step Bellman
/// update over all actions (every `stride`-th state). The second member is
/// the largest gap between the stored action's value and the stored value.
std::pair<double, double> bellman_residual(const DemandDistribution& d, const ValueTable& table,
                                           std::int64_t stride = 1);

/// Orders read from a value table; expects unit ticks (scale 1).
class TabularPolicy final : public Policy {
 public:
  explicit TabularPolicy(std::shared_ptr<const ValueTable> table) : table_(std::move(table)) {}
  std::string name() const override { return "dp_table"; }
  std::int64_t order(const DecisionContext& ctx, const SystemState& state,
                     rng::Stream& stream) const override;
  const ValueTable& table() const noexcept { return *table_; }

 private:
  std::shared_ptr<const ValueTable> table_;
};

struct PolicyEvaluation {
  double mean = 0;
  double std_error = 0;
  bool exact = false;
  std::int64_t reps = 0;
  std::int64_t peak_states = 0;
};

/// Exact mode walks the full state distribution forward (the randomised first
/// order is integrated over its pmf; later orders must be deterministic
/// functions of the state). Monte Carlo mode runs `reps` replications.
PolicyEvaluation evaluate_policy(const Policy& policy, const DemandDistribution& d, double c,
                                 double h, std::int64_t L, std::int64_t T, bool exact,
                                 std::int64_t reps = 0, std::uint64_t root_seed = 0,
                                 int threads = 1, std::int64_t state_budget = 5'000'000);

struct RatioResult {
  double opt = 0;
  double cost_pi_z = 0;  // T * stationary_cost(z)
  double ratio = 0;
  double z = 0;
  DPSolution dp;
};

RatioResult opt_ratio(const DemandDistribution& d, double c, double h, const DPConfig& cfg,
                      double z_grid_step = 0);

/// Binary table artifact: "LSVT1\n", a u64 header length, a JSON header
/// {L, T, lattice, caps, checksum, demand, c, h, opt}, then first orders
/// (i64), values (f64) and actions (u16) in period order.
void save_table(const ValueTable& table, const std::string& path);
std::shared_ptr<const ValueTable> load_table(const std::string& path);

}  // namespace lostsales
