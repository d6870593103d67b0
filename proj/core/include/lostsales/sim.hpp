#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/policy.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

/// One period of the dynamics. Quantities are ticks at the trajectory scale;
/// I is the inventory at the start of the period, before x1 arrives.
struct PeriodRecord {
  std::int64_t t = 0;
  std::int64_t I = 0;
  std::int64_t x1 = 0;
  std::int64_t order = 0;
  std::int64_t D = 0;
  std::int64_t N = 0;
  double C = 0;
};

struct Trajectory {
  std::int64_t L = 0;
  std::int64_t T = 0;
  std::int64_t scale = 1;   // ticks per lattice unit
  double tick = 1;          // real size of one tick
  std::uint64_t demand_seed = 0;
  std::uint64_t policy_seed = 0;
  std::vector<PeriodRecord> records;  // t = 1, 2, ...
  std::int64_t final_inventory = 0;   // inventory after the last record

  /// I_t for 1 <= t <= records.size() + 1.
  std::int64_t inventory(std::int64_t t) const;
  /// Sum of C_t over the penalised window [L+1, T+L].
  double window_cost() const;
  /// CSV with header t,I,x1,order,D,N,C; quantities in real units.
  std::string to_csv() const;
};

/// Ticks per lattice unit needed to run `policy` exactly.
std::int64_t trajectory_scale(const Policy& policy);

/// Runs periods 1..periods (default T+L). Orders after period T are 0.
Trajectory run_trajectory(const Policy& policy, const DemandDistribution& d, double c, double h,
                          std::int64_t L, std::int64_t T, rng::Stream& demand_stream,
                          rng::Stream& policy_stream, std::int64_t periods = 0);

struct CostSummary {
  double mean = 0;     // expected total cost over the window
  double std_error = 0;
  std::int64_t reps = 0;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;
};

/// Independent replications; replication i uses the streams
/// child(root, "sim.demand", i) and child(root, "sim.policy", i).
CostSummary simulate(const Policy& policy, const DemandDistribution& d, double c, double h,
                     std::int64_t L, std::int64_t T, std::int64_t reps, std::uint64_t root_seed,
                     int threads = 1);

struct LongRunSummary {
  double per_period_mean = 0;
  double std_error = 0;  // batch means
  std::int64_t batches = 0;
  std::int64_t periods = 0;
};

/// One long trajectory; the per-period window mean with a batch-means error
/// bar. Requires T >= batches; batches have floor(T / batches) periods.
LongRunSummary simulate_long_run(const Policy& policy, const DemandDistribution& d, double c,
                                 double h, std::int64_t L, std::int64_t T, std::uint64_t root_seed,
                                 std::int64_t batches = 30);

/// sum N_t - (I_{t2} - I_{t1} + sum D_t - sum x_{1,t}) over t in [t1, t2).
std::int64_t conservation_check(const Trajectory& traj, std::int64_t t1, std::int64_t t2);

/// Pipeline and inventory on a common integer grid.
struct QuantizedState {
  std::int64_t scale = 1;  // ticks per lattice unit
  std::vector<std::int64_t> x;
  std::int64_t I = 0;
};

/// Throws LatticeMismatch when a value is not commensurate with the lattice.
QuantizedState quantize(const std::vector<double>& x, double I, const DemandDistribution& d);

/// Fixed demand scenarios (lattice units) shared across evaluations.
struct ScenarioSet {
  std::int64_t length = 0;
  std::vector<std::int64_t> demand;  // row-major, rows of `length`

  std::size_t size() const noexcept { return length ? demand.size() / static_cast<std::size_t>(length) : 0; }
  const std::int64_t* row(std::size_t i) const noexcept { return demand.data() + i * static_cast<std::size_t>(length); }
  static ScenarioSet draw(const DemandDistribution& d, std::int64_t length, std::size_t count,
                          rng::Stream& stream);
};

struct WindowCost {
  double value = 0;
  double std_error = 0;  // 0 in exact mode
  bool exact = true;
  double holding = 0;  // h part
  double shortage = 0; // c part
};

/// The L-period cost given pipeline x and inventory I written through the
/// max-of-partial-sums representation of the inventory, by enumeration of all
/// |support|^L demand sequences. Throws BudgetExceeded past `budget`.
WindowCost window_cost_formula(const std::vector<double>& x, double I, const DemandDistribution& d,
                               double c, double h, std::int64_t budget = 20'000'000);

/// Same formula averaged over a scenario set.
WindowCost window_cost_formula(const std::vector<double>& x, double I, const DemandDistribution& d,
                               double c, double h, const ScenarioSet& scenarios);

/// The same cost by stepping the dynamics along every demand sequence.
WindowCost window_cost_enumerate(const std::vector<double>& x, double I, const DemandDistribution& d,
                                 double c, double h, std::int64_t budget = 20'000'000);

/// The same cost by propagating the inventory distribution period by period.
WindowCost window_cost_dynamics(const QuantizedState& state, const DemandDistribution& d, double c,
                                double h);

/// E[I_{L+1}] for the window starting in `state`, from the same recursion.
double expected_final_inventory(const QuantizedState& state, const DemandDistribution& d);

}  // namespace lostsales
