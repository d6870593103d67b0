#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/lindley.hpp"
#include "lostsales/rational.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

/// State seen when the period-t order is placed, before x_{1,t} is received.
/// Quantities are integer ticks; one lattice unit is `scale` ticks.
struct SystemState {
  std::int64_t t = 1;
  std::int64_t inventory = 0;
  std::vector<std::int64_t> pipeline;  // pipeline[0] arrives next
};

struct DecisionContext {
  std::int64_t L = 1;
  std::int64_t T = 2;
  double c = 1;
  double h = 1;
  const DemandDistribution* demand = nullptr;
  std::int64_t scale = 1;  // ticks per lattice unit
};

/// Pmf over order sizes in ticks.
using OrderLaw = std::vector<std::pair<std::int64_t, double>>;

/// An admissible decision rule. Implementations are immutable; any
/// per-trajectory randomness is drawn from the stream handed to order().
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  /// Ticks per lattice unit needed to represent every order exactly.
  virtual std::int64_t required_scale() const { return 1; }
  /// True when the period-1 order is random; first_order_law() gives its pmf
  /// and every later order is a deterministic function of the state.
  virtual bool randomized_first_order() const { return false; }
  virtual OrderLaw first_order_law(const DecisionContext& ctx) const;
  /// Order for period state.t <= T, in ticks at ctx.scale.
  virtual std::int64_t order(const DecisionContext& ctx, const SystemState& state,
                             rng::Stream& stream) const = 0;
};

/// pi_r: orders I + r in period 1 with I drawn from the supremum law, then r.
class ConstantOrderPolicy final : public Policy {
 public:
  ConstantOrderPolicy(const DemandDistribution& d, double r, SupremumSolution sup);
  std::string name() const override;
  std::int64_t required_scale() const override { return sup_.lattice.scale; }
  bool randomized_first_order() const override { return true; }
  OrderLaw first_order_law(const DecisionContext& ctx) const override;
  std::int64_t order(const DecisionContext& ctx, const SystemState& state,
                     rng::Stream& stream) const override;

  double rate() const noexcept { return r_; }
  const SupremumSolution& supremum() const noexcept { return sup_; }

 private:
  std::int64_t to_ctx(const DecisionContext& ctx, std::int64_t ticks) const;

  double r_;
  SupremumSolution sup_;
  std::vector<double> cdf_;
};

/// Throws RateTooHigh for r >= E[D] and BadParameter if `sup` was built for
/// another rate.
std::shared_ptr<const ConstantOrderPolicy> make_constant_order(const DemandDistribution& d, double r,
                                                               SupremumSolution sup);
/// Convenience overload that solves the supremum law itself.
std::shared_ptr<const ConstantOrderPolicy> make_constant_order(const DemandDistribution& d, double r);

/// Order up to S (lattice units, may be fractional) on inventory position.
class BaseStockPolicy final : public Policy {
 public:
  explicit BaseStockPolicy(Rational level);
  std::string name() const override;
  std::int64_t required_scale() const override { return level_.den; }
  std::int64_t order(const DecisionContext& ctx, const SystemState& state,
                     rng::Stream& stream) const override;

 private:
  Rational level_;
};

std::shared_ptr<const BaseStockPolicy> make_base_stock(double level, const DemandDistribution& d);

/// Always orders 0.
class ZeroPolicy final : public Policy {
 public:
  std::string name() const override { return "zero"; }
  std::int64_t order(const DecisionContext&, const SystemState&, rng::Stream&) const override {
    return 0;
  }
};

/// h E[I^r] + c (E[D] - r).
double stationary_cost(const DemandDistribution& d, double c, double h, double r,
                       const SupremumSolution& sup);

struct ZSearchPoint {
  double v = 0;
  double objective = 0;  // h E[I^v] - c v
};

struct ZSearchResult {
  double z = 0;
  double objective = 0;
  double cost = 0;  // stationary_cost at z
  double grid_step = 0;
  std::vector<ZSearchPoint> grid;  // evaluated points in increasing v
  SupremumSolution sup;            // law at z
};

/// Smallest minimiser of h E[I^v] - c v over {0, step, 2 step, ...} below
/// E[D]. Points past which the objective provably cannot improve are skipped.
/// step <= 0 selects a quarter lattice unit.
ZSearchResult best_constant_z(const DemandDistribution& d, double c, double h, double grid_step = 0,
                              const LindleyOptions& opts = {});

}  // namespace lostsales
