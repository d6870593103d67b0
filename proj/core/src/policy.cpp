#include "lostsales/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lostsales/error.hpp"

namespace lostsales {

OrderLaw Policy::first_order_law(const DecisionContext&) const {
  throw Error(ErrorCode::BadParameter, name() + " has a deterministic first order");
}

ConstantOrderPolicy::ConstantOrderPolicy(const DemandDistribution& d, double r, SupremumSolution sup)
    : r_(r), sup_(std::move(sup)) {
  if (r >= d.mean()) throw Error(ErrorCode::RateTooHigh, "r must be below E[D]");
  const auto lat = rate_lattice(d, r);
  if (!(lat.rate == sup_.lattice.rate)) {
    throw Error(ErrorCode::BadParameter, "supremum solution was computed for a different rate");
  }
  cdf_.resize(sup_.pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf_.size(); ++i) cdf_[i] = (acc += sup_.pmf[i]);
}

std::string ConstantOrderPolicy::name() const {
  std::ostringstream os;
  os << "constant(r=" << r_ << ")";
  return os.str();
}

std::int64_t ConstantOrderPolicy::to_ctx(const DecisionContext& ctx, std::int64_t ticks) const {
  if (ctx.scale % sup_.lattice.scale != 0) {
    throw Error(ErrorCode::LatticeMismatch, "simulation scale does not refine the order lattice");
  }
  return ticks * (ctx.scale / sup_.lattice.scale);
}

OrderLaw ConstantOrderPolicy::first_order_law(const DecisionContext& ctx) const {
  OrderLaw law;
  for (std::size_t i = 0; i < sup_.pmf.size(); ++i) {
    if (sup_.pmf[i] > 0.0) {
      law.emplace_back(to_ctx(ctx, static_cast<std::int64_t>(i) + sup_.lattice.up), sup_.pmf[i]);
    }
  }
  return law;
}

std::int64_t ConstantOrderPolicy::order(const DecisionContext& ctx, const SystemState& state,
                                        rng::Stream& stream) const {
  if (state.t != 1) return to_ctx(ctx, sup_.lattice.up);
  // Inverse cdf; the trimmed residual mass falls on the last atom.
  const double u = stream.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  return to_ctx(ctx, static_cast<std::int64_t>(idx) + sup_.lattice.up);
}

std::shared_ptr<const ConstantOrderPolicy> make_constant_order(const DemandDistribution& d, double r,
                                                               SupremumSolution sup) {
  return std::make_shared<const ConstantOrderPolicy>(d, r, std::move(sup));
}

std::shared_ptr<const ConstantOrderPolicy> make_constant_order(const DemandDistribution& d, double r) {
  if (r >= d.mean()) throw Error(ErrorCode::RateTooHigh, "r must be below E[D]");
  return make_constant_order(d, r, stationary_waiting(d, r));
}

BaseStockPolicy::BaseStockPolicy(Rational level) : level_(level) {
  if (level_.num < 0) throw Error(ErrorCode::BadParameter, "base-stock level must be >= 0");
}

std::string BaseStockPolicy::name() const { return "base_stock(S=" + level_.str() + ")"; }

std::int64_t BaseStockPolicy::order(const DecisionContext& ctx, const SystemState& state,
                                    rng::Stream&) const {
  if (ctx.scale % level_.den != 0) {
    throw Error(ErrorCode::LatticeMismatch, "simulation scale does not refine the base-stock level");
  }
  const std::int64_t target = level_.num * (ctx.scale / level_.den);
  std::int64_t position = state.inventory;
  for (auto x : state.pipeline) position += x;
  return std::max<std::int64_t>(0, target - position);
}

std::shared_ptr<const BaseStockPolicy> make_base_stock(double level, const DemandDistribution& d) {
  if (!(level >= 0.0)) throw Error(ErrorCode::BadParameter, "base-stock level must be >= 0");
  const auto q = rationalize(level / d.unit_value());
  if (!q) throw Error(ErrorCode::LatticeMismatch, "base-stock level not commensurate with lattice");
  return std::make_shared<const BaseStockPolicy>(*q);
}

double stationary_cost(const DemandDistribution& d, double c, double h, double r,
                       const SupremumSolution& sup) {
  if (r >= d.mean()) throw Error(ErrorCode::RateTooHigh, "r must be below E[D]");
  if (std::abs(sup.r - r) > 1e-12 * std::max(1.0, r)) {
    throw Error(ErrorCode::BadParameter, "supremum solution was computed for a different rate");
  }
  return h * sup.mean + c * (d.mean() - r);
}

ZSearchResult best_constant_z(const DemandDistribution& d, double c, double h, double grid_step,
                              const LindleyOptions& opts) {
  if (!(c > 0.0 && h > 0.0)) throw Error(ErrorCode::BadParameter, "c and h must be positive");
  if (grid_step <= 0.0) grid_step = d.unit_value() / 4.0;
  const auto step = rationalize(grid_step / d.unit_value());
  if (!step) throw Error(ErrorCode::LatticeMismatch, "z grid step not commensurate with lattice");

  ZSearchResult out;
  out.grid_step = grid_step;
  bool have = false;
  for (std::int64_t k = 0;; ++k) {
    const Rational v_units = Rational(k) * *step;
    const double v = v_units.to_double() * d.unit_value();
    if (v >= d.mean()) break;
    auto sup = stationary_waiting(d, v, opts);
    const double obj = h * sup.mean - c * v;
    out.grid.push_back({v, obj});
    if (!have || obj < out.objective) {
      have = true;
      out.z = v;
      out.objective = obj;
      out.sup = std::move(sup);
    } else if (h * sup.mean - c * d.mean() >= out.objective) {
      // E[I^v] is nondecreasing in v, so no later grid point can do better.
      break;
    }
  }
  out.cost = h * out.sup.mean + c * (d.mean() - out.z);
  return out;
}

}  // namespace lostsales
