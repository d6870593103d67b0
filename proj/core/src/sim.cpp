#include "lostsales/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "lostsales/error.hpp"
#include "lostsales/parallel.hpp"
#include "lostsales/stats.hpp"

namespace lostsales {

std::int64_t Trajectory::inventory(std::int64_t t) const {
  const auto n = static_cast<std::int64_t>(records.size());
  if (t < 1 || t > n + 1) throw Error(ErrorCode::BadParameter, "period outside trajectory");
  return t == n + 1 ? final_inventory : records[static_cast<std::size_t>(t - 1)].I;
}

double Trajectory::window_cost() const {
  double total = 0.0;
  for (const auto& r : records) {
    if (r.t >= L + 1 && r.t <= T + L) total += r.C;
  }
  return total;
}

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,I,x1,order,D,N,C\n";
  for (const auto& r : records) {
    os << r.t << ',' << static_cast<double>(r.I) * tick << ',' << static_cast<double>(r.x1) * tick
       << ',' << static_cast<double>(r.order) * tick << ',' << static_cast<double>(r.D) * tick << ','
       << static_cast<double>(r.N) * tick << ',' << r.C << '\n';
  }
  return os.str();
}

std::int64_t trajectory_scale(const Policy& policy) {
  const auto s = policy.required_scale();
  if (s < 1) throw Error(ErrorCode::BadParameter, "policy scale must be positive");
  return s;
}

namespace {

void check_horizon(std::int64_t L, std::int64_t T) {
  if (!(L > 0 && T > L)) throw Error(ErrorCode::BadParameter, "require T > L > 0");
}

// Steps the dynamics; `sink` sees every period record.
template <class Sink>
std::int64_t run_periods(const Policy& policy, const DemandDistribution& d, double c, double h,
                         std::int64_t L, std::int64_t T, std::int64_t scale, std::int64_t periods,
                         const DemandSampler& sampler, rng::Stream& demand_stream,
                         rng::Stream& policy_stream, Sink&& sink) {
  const DecisionContext ctx{L, T, c, h, &d, scale};
  const double tick = d.unit_value() / static_cast<double>(scale);
  SystemState st;
  st.pipeline.assign(static_cast<std::size_t>(L), 0);
  for (std::int64_t t = 1; t <= periods; ++t) {
    st.t = t;
    const std::int64_t order = t <= T ? policy.order(ctx, st, policy_stream) : 0;
    if (order < 0) throw Error(ErrorCode::BadParameter, policy.name() + " returned a negative order");
    PeriodRecord rec;
    rec.t = t;
    rec.I = st.inventory;
    rec.x1 = st.pipeline.front();
    rec.order = order;
    rec.D = sampler.draw(demand_stream) * scale;
    const std::int64_t net = rec.I + rec.x1 - rec.D;
    const std::int64_t next = std::max<std::int64_t>(net, 0);
    rec.N = std::max<std::int64_t>(-net, 0);
    rec.C = (h * static_cast<double>(next) + c * static_cast<double>(rec.N)) * tick;
    std::rotate(st.pipeline.begin(), st.pipeline.begin() + 1, st.pipeline.end());
    st.pipeline.back() = order;
    st.inventory = next;
    sink(rec);
  }
  return st.inventory;
}

}  // namespace

Trajectory run_trajectory(const Policy& policy, const DemandDistribution& d, double c, double h,
                          std::int64_t L, std::int64_t T, rng::Stream& demand_stream,
                          rng::Stream& policy_stream, std::int64_t periods) {
  check_horizon(L, T);
  Trajectory traj;
  traj.L = L;
  traj.T = T;
  traj.scale = trajectory_scale(policy);
  traj.tick = d.unit_value() / static_cast<double>(traj.scale);
  traj.demand_seed = demand_stream.seed();
  traj.policy_seed = policy_stream.seed();
  if (periods <= 0) periods = T + L;
  traj.records.reserve(static_cast<std::size_t>(periods));
  const DemandSampler sampler(d);
  traj.final_inventory =
      run_periods(policy, d, c, h, L, T, traj.scale, periods, sampler, demand_stream, policy_stream,
                  [&](const PeriodRecord& r) { traj.records.push_back(r); });
  return traj;
}

CostSummary simulate(const Policy& policy, const DemandDistribution& d, double c, double h,
                     std::int64_t L, std::int64_t T, std::int64_t reps, std::uint64_t root_seed,
                     int threads) {
  check_horizon(L, T);
  if (reps < 1) throw Error(ErrorCode::BadParameter, "reps must be >= 1");
  const auto scale = trajectory_scale(policy);
  const DemandSampler sampler(d);
  std::vector<double> totals(static_cast<std::size_t>(reps));
  parallel_for(totals.size(), threads, [&](std::size_t i) {
    auto ds = rng::Stream::child(root_seed, "sim.demand", i);
    auto ps = rng::Stream::child(root_seed, "sim.policy", i);
    double total = 0.0;
    run_periods(policy, d, c, h, L, T, scale, T + L, sampler, ds, ps, [&](const PeriodRecord& r) {
      if (r.t >= L + 1) total += r.C;
    });
    totals[i] = total;
  });
  RunningStats stats;
  for (double x : totals) stats.add(x);
  return {stats.mean(), stats.stderr_of_mean(), reps, L + 1, T + L};
}

LongRunSummary simulate_long_run(const Policy& policy, const DemandDistribution& d, double c,
                                 double h, std::int64_t L, std::int64_t T, std::uint64_t root_seed,
                                 std::int64_t batches) {
  check_horizon(L, T);
  if (batches < 2 || T < batches) throw Error(ErrorCode::BadParameter, "need 2 <= batches <= T");
  const auto scale = trajectory_scale(policy);
  const DemandSampler sampler(d);
  auto ds = rng::Stream::child(root_seed, "sim.demand", 0);
  auto ps = rng::Stream::child(root_seed, "sim.policy", 0);
  const std::int64_t size = T / batches;
  std::vector<double> sums(static_cast<std::size_t>(batches), 0.0);
  run_periods(policy, d, c, h, L, T, scale, T + L, sampler, ds, ps, [&](const PeriodRecord& r) {
    const std::int64_t k = r.t - (L + 1);
    if (k >= 0 && k < size * batches) sums[static_cast<std::size_t>(k / size)] += r.C;
  });
  RunningStats stats;
  for (double s : sums) stats.add(s / static_cast<double>(size));
  return {stats.mean(), stats.stderr_of_mean(), batches, size * batches};
}

std::int64_t conservation_check(const Trajectory& traj, std::int64_t t1, std::int64_t t2) {
  const auto n = static_cast<std::int64_t>(traj.records.size());
  if (!(1 <= t1 && t1 < t2 && t2 <= n + 1)) throw Error(ErrorCode::BadParameter, "bad window");
  std::int64_t lost = 0, demand = 0, received = 0;
  for (std::int64_t t = t1; t < t2; ++t) {
    const auto& r = traj.records[static_cast<std::size_t>(t - 1)];
    lost += r.N;
    demand += r.D;
    received += r.x1;
  }
  return lost - (traj.inventory(t2) - traj.inventory(t1) + demand - received);
}

QuantizedState quantize(const std::vector<double>& x, double I, const DemandDistribution& d) {
  if (x.empty()) throw Error(ErrorCode::BadParameter, "pipeline must be non-empty");
  std::vector<Rational> parts;
  parts.reserve(x.size() + 1);
  auto convert = [&](double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::BadParameter, "quantities must be >= 0");
    const auto q = rationalize(v / d.unit_value());
    if (!q) throw Error(ErrorCode::LatticeMismatch, "value not commensurate with the demand lattice");
    parts.push_back(*q);
  };
  for (double v : x) convert(v);
  convert(I);
  QuantizedState st;
  for (const auto& p : parts) st.scale = lcm(st.scale, p.den);
  for (std::size_t i = 0; i < x.size(); ++i) st.x.push_back(parts[i].num * (st.scale / parts[i].den));
  st.I = parts.back().num * (st.scale / parts.back().den);
  return st;
}

ScenarioSet ScenarioSet::draw(const DemandDistribution& d, std::int64_t length, std::size_t count,
                              rng::Stream& stream) {
  if (length < 1 || count < 1) throw Error(ErrorCode::BadParameter, "empty scenario set");
  const DemandSampler sampler(d);
  ScenarioSet s;
  s.length = length;
  s.demand.resize(count * static_cast<std::size_t>(length));
  for (auto& v : s.demand) v = sampler.draw(stream);
  return s;
}

namespace {

void check_budget(const DemandDistribution& d, std::size_t L, std::int64_t budget) {
  if (std::pow(static_cast<double>(d.support_size()), static_cast<double>(L)) > static_cast<double>(budget)) {
    throw Error(ErrorCode::BudgetExceeded, "support^L exceeds enumeration budget");
  }
}

// Calls fn(demand ticks, probability) for every demand sequence of length L.
template <class F>
void for_each_sequence(const DemandDistribution& d, std::int64_t scale, std::size_t L, F&& fn) {
  std::vector<std::size_t> idx(L, 0);
  std::vector<std::int64_t> D(L);
  const auto atoms = d.atoms();
  const auto probs = d.probs();
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < L; ++i) {
      D[i] = atoms[idx[i]] * scale;
      p *= probs[idx[i]];
    }
    fn(std::as_const(D), p);
    std::size_t pos = 0;
    while (pos < L && ++idx[pos] == atoms.size()) idx[pos++] = 0;
    if (pos == L) break;
  }
}

// sum_k max_j (sum_{i=k+1-j}^k (x_i - D_i) + [j=k] I), and the k = L term.
std::pair<std::int64_t, std::int64_t> formula_terms(const QuantizedState& st, const std::int64_t* D) {
  const std::size_t L = st.x.size();
  std::int64_t total = 0, last = 0;
  for (std::size_t k = 1; k <= L; ++k) {
    std::int64_t best = 0, partial = 0;
    for (std::size_t j = 1; j <= k; ++j) {
      const std::size_t i = k - j;  // zero-based index k+1-j
      partial += st.x[i] - D[i];
      best = std::max(best, partial + (j == k ? st.I : 0));
    }
    total += best;
    if (k == L) last = best;
  }
  return {total, last};
}

WindowCost assemble(const QuantizedState& st, const DemandDistribution& d, double c, double h,
                    double holding_ticks, double final_ticks) {
  const double tick = d.unit_value() / static_cast<double>(st.scale);
  std::int64_t xsum = 0;
  for (auto v : st.x) xsum += v;
  WindowCost w;
  w.holding = h * holding_ticks * tick;
  w.shortage = c * ((final_ticks - static_cast<double>(st.I) - static_cast<double>(xsum)) * tick +
                    static_cast<double>(st.x.size()) * d.mean());
  w.value = w.holding + w.shortage;
  return w;
}

}  // namespace

WindowCost window_cost_formula(const std::vector<double>& x, double I, const DemandDistribution& d,
                               double c, double h, std::int64_t budget) {
  const auto st = quantize(x, I, d);
  check_budget(d, st.x.size(), budget);
  double holding = 0.0, final_inv = 0.0;
  for_each_sequence(d, st.scale, st.x.size(), [&](const std::vector<std::int64_t>& D, double p) {
    const auto [total, last] = formula_terms(st, D.data());
    holding += p * static_cast<double>(total);
    final_inv += p * static_cast<double>(last);
  });
  return assemble(st, d, c, h, holding, final_inv);
}

WindowCost window_cost_formula(const std::vector<double>& x, double I, const DemandDistribution& d,
                               double c, double h, const ScenarioSet& scenarios) {
  const auto st = quantize(x, I, d);
  if (scenarios.length != static_cast<std::int64_t>(st.x.size())) {
    throw Error(ErrorCode::BadParameter, "scenario length must equal L");
  }
  const double tick = d.unit_value() / static_cast<double>(st.scale);
  std::int64_t xsum = 0;
  for (auto v : st.x) xsum += v;
  const double constant =
      c * (static_cast<double>(st.x.size()) * d.mean() - static_cast<double>(st.I + xsum) * tick);
  RunningStats value, holding, final_inv;
  std::vector<std::int64_t> D(st.x.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto* row = scenarios.row(s);
    for (std::size_t i = 0; i < D.size(); ++i) D[i] = row[i] * st.scale;
    const auto [total, last] = formula_terms(st, D.data());
    const double hold = h * static_cast<double>(total) * tick;
    const double fin = static_cast<double>(last) * tick;
    holding.add(hold);
    final_inv.add(fin);
    value.add(hold + c * fin + constant);
  }
  WindowCost w;
  w.exact = false;
  w.value = value.mean();
  w.std_error = value.stderr_of_mean();
  w.holding = holding.mean();
  w.shortage = w.value - w.holding;
  return w;
}

WindowCost window_cost_enumerate(const std::vector<double>& x, double I, const DemandDistribution& d,
                                 double c, double h, std::int64_t budget) {
  const auto st = quantize(x, I, d);
  check_budget(d, st.x.size(), budget);
  const double tick = d.unit_value() / static_cast<double>(st.scale);
  double holding = 0.0, shortage = 0.0;
  for_each_sequence(d, st.scale, st.x.size(), [&](const std::vector<std::int64_t>& D, double p) {
    std::int64_t inv = st.I, held = 0, lost = 0;
    for (std::size_t i = 0; i < D.size(); ++i) {
      const std::int64_t net = inv + st.x[i] - D[i];
      inv = std::max<std::int64_t>(net, 0);
      held += inv;
      lost += std::max<std::int64_t>(-net, 0);
    }
    holding += p * static_cast<double>(held);
    shortage += p * static_cast<double>(lost);
  });
  WindowCost w;
  w.holding = h * holding * tick;
  w.shortage = c * shortage * tick;
  w.value = w.holding + w.shortage;
  return w;
}

namespace {

// Propagates the inventory pmf through the window; returns (E sum I, E sum N,
// E I_{L+1}) in ticks.
struct Moments {
  double held = 0, lost = 0, final_inv = 0;
};

Moments propagate(const QuantizedState& st, const DemandDistribution& d) {
  std::vector<double> pmf(static_cast<std::size_t>(st.I) + 1, 0.0);
  pmf.back() = 1.0;
  std::vector<double> next;
  Moments m;
  const auto atoms = d.atoms();
  const auto probs = d.probs();
  for (std::size_t i = 0; i < st.x.size(); ++i) {
    const auto len = static_cast<std::int64_t>(pmf.size());
    next.assign(static_cast<std::size_t>(len + st.x[i]), 0.0);
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const std::int64_t shift = st.x[i] - atoms[a] * st.scale;
      const double p = probs[a];
      for (std::int64_t w = 0; w < len; ++w) {
        const double mass = pmf[static_cast<std::size_t>(w)];
        if (mass == 0.0) continue;
        const std::int64_t net = w + shift;
        if (net > 0) {
          next[static_cast<std::size_t>(net)] += p * mass;
          m.held += p * mass * static_cast<double>(net);
        } else {
          next[0] += p * mass;
          m.lost += p * mass * static_cast<double>(-net);
        }
      }
    }
    pmf.swap(next);
  }
  for (std::size_t w = 0; w < pmf.size(); ++w) m.final_inv += pmf[w] * static_cast<double>(w);
  return m;
}

}  // namespace

WindowCost window_cost_dynamics(const QuantizedState& state, const DemandDistribution& d, double c,
                                double h) {
  if (state.x.empty()) throw Error(ErrorCode::BadParameter, "pipeline must be non-empty");
  const auto m = propagate(state, d);
  const double tick = d.unit_value() / static_cast<double>(state.scale);
  WindowCost w;
  w.holding = h * m.held * tick;
  w.shortage = c * m.lost * tick;
  w.value = w.holding + w.shortage;
  return w;
}

double expected_final_inventory(const QuantizedState& state, const DemandDistribution& d) {
  if (state.x.empty()) throw Error(ErrorCode::BadParameter, "pipeline must be non-empty");
  return propagate(state, d).final_inv * d.unit_value() / static_cast<double>(state.scale);
}

}  // namespace lostsales
