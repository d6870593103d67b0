#include "lostsales/dp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "lostsales/error.hpp"
#include "lostsales/parallel.hpp"
#include "lostsales/sim.hpp"

namespace lostsales {

namespace {

std::int64_t checked_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t out = 1;
  for (std::int64_t i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::int64_t>::max() / base) {
      throw Error(ErrorCode::StateBudgetExceeded, "state space size overflows");
    }
    out *= base;
  }
  return out;
}

// Probability that on-hand y (after receipt) leaves v = (y - D)^+, as a list
// of (v, weight) in increasing v.
std::vector<std::pair<std::int64_t, double>> leftover_law(const DemandDistribution& d, std::int64_t y) {
  std::vector<std::pair<std::int64_t, double>> out;
  const auto atoms = d.atoms();
  const auto probs = d.probs();
  double at_zero = 0.0;
  for (std::size_t i = atoms.size(); i-- > 0;) {
    const std::int64_t v = y - atoms[i];
    if (v <= 0) {
      at_zero += probs[i];
    } else {
      out.emplace_back(v, probs[i]);
    }
  }
  // atoms were visited in decreasing order, so v is increasing here
  if (at_zero > 0.0) out.insert(out.begin(), {0, at_zero});
  return out;
}

std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::int64_t ValueTable::rest_size() const noexcept {
  std::int64_t r = 1;
  for (std::int64_t i = 1; i < L; ++i) r *= radix();
  return r;
}

std::int64_t ValueTable::index(std::int64_t y, const std::vector<std::int64_t>& rest) const {
  if (static_cast<std::int64_t>(rest.size()) != L - 1) {
    throw Error(ErrorCode::BadParameter, "pipeline tail must have L-1 entries");
  }
  if (y < 0 || y > inventory_cap) throw Error(ErrorCode::BadParameter, "y outside table");
  std::int64_t digits = 0;
  for (auto x : rest) {
    if (x < 0 || x > order_cap) throw Error(ErrorCode::BadParameter, "pipeline entry outside table");
    digits = digits * radix() + x;
  }
  return y * rest_size() + digits;
}

double ValueTable::value(std::int64_t t, std::int64_t y, const std::vector<std::int64_t>& rest) const {
  if (t < L + 1 || t > T + L + 1) throw Error(ErrorCode::BadParameter, "period outside table");
  if (t == T + L + 1) return 0.0;
  return values[static_cast<std::size_t>(t - L - 1)][static_cast<std::size_t>(index(y, rest))];
}

std::int64_t ValueTable::action(std::int64_t t, std::int64_t y, const std::vector<std::int64_t>& rest) const {
  if (t < 1 || t > T + L) throw Error(ErrorCode::BadParameter, "period outside table");
  if (t <= L) return first_orders[static_cast<std::size_t>(t - 1)];
  if (t > T) return 0;
  return actions[static_cast<std::size_t>(t - L - 1)][static_cast<std::size_t>(index(y, rest))];
}

std::uint64_t ValueTable::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& v : values) h = fnv_bytes(h, v.data(), v.size() * sizeof(double));
  for (const auto& a : actions) h = fnv_bytes(h, a.data(), a.size() * sizeof(std::uint16_t));
  return h;
}

DPSolution solve(const DemandDistribution& d, double c, double h, const DPConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.L > 0 && cfg.T > cfg.L)) throw Error(ErrorCode::BadParameter, "require T > L > 0");
  const auto nv = newsvendor(d, c, h);
  const std::int64_t L = cfg.L, T = cfg.T;
  const std::int64_t A = cfg.order_cap < 0 ? nv.q_lattice : cfg.order_cap;
  const std::int64_t Y = cfg.inventory_cap < 0 ? nv.q_lattice * (L + 2) : cfg.inventory_cap;
  if (A > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::BadParameter, "order cap too large for the action table");
  }
  if (Y < A) throw Error(ErrorCode::BadParameter, "inventory cap must be at least the order cap");

  const std::int64_t K = A + 1;
  const std::int64_t R = checked_pow(K, L - 1);
  const std::int64_t P = L >= 2 ? R / K : 1;
  if (R > cfg.state_budget / (Y + 1)) {
    throw Error(ErrorCode::StateBudgetExceeded,
                "state count exceeds budget " + std::to_string(cfg.state_budget));
  }
  const std::int64_t S = (Y + 1) * R;

  auto table = std::make_shared<ValueTable>();
  table->L = L;
  table->T = T;
  table->order_cap = A;
  table->inventory_cap = Y;
  table->unit = d.unit();
  table->c = c;
  table->h = h;
  table->demand_fingerprint = d.fingerprint();
  table->values.resize(static_cast<std::size_t>(T));
  table->actions.resize(static_cast<std::size_t>(T - L));

  std::vector<double> cost(static_cast<std::size_t>(Y + 1));
  std::vector<std::vector<std::pair<std::int64_t, double>>> leftover(cost.size());
  for (std::int64_t y = 0; y <= Y; ++y) {
    cost[static_cast<std::size_t>(y)] = single_period_cost(d, c, h, y);
    leftover[static_cast<std::size_t>(y)] = leftover_law(d, y);
  }

  std::vector<double> next(static_cast<std::size_t>(S), 0.0);
  for (std::int64_t t = T + L; t >= L + 1; --t) {
    std::vector<double> cur(static_cast<std::size_t>(S));
    const bool decide = t <= T;
    std::vector<std::uint16_t> act;
    if (decide) act.assign(static_cast<std::size_t>(S), 0);
    const std::int64_t amax = decide ? A : 0;

    parallel_for(static_cast<std::size_t>(Y + 1), cfg.threads, [&](std::size_t yi) {
      const auto y = static_cast<std::int64_t>(yi);
      const auto& law = leftover[yi];
      if (L == 1) {
        double best = std::numeric_limits<double>::infinity();
        std::int64_t arg = 0;
        for (std::int64_t a = 0; a <= amax; ++a) {
          double e = 0.0;
          for (const auto& [v, w] : law) e += w * next[static_cast<std::size_t>(std::min(v + a, Y))];
          if (e < best) {
            best = e;
            arg = a;
          }
        }
        cur[yi] = cost[yi] + best;
        if (decide) act[yi] = static_cast<std::uint16_t>(arg);
        return;
      }
      std::vector<double> F(static_cast<std::size_t>(R));
      std::vector<std::pair<std::int64_t, double>> targets;
      for (std::int64_t x2 = 0; x2 < K; ++x2) {
        targets.clear();
        for (const auto& [v, w] : law) {
          const std::int64_t yp = std::min(v + x2, Y);
          if (!targets.empty() && targets.back().first == yp) {
            targets.back().second += w;
          } else {
            targets.emplace_back(yp, w);
          }
        }
        std::fill(F.begin(), F.end(), 0.0);
        for (const auto& [yp, w] : targets) {
          const double* row = next.data() + yp * R;
          double* f = F.data();
          for (std::int64_t i = 0; i < R; ++i) f[i] += w * row[i];
        }
        for (std::int64_t tail = 0; tail < P; ++tail) {
          const double* f = F.data() + tail * K;
          double best = f[0];
          std::int64_t arg = 0;
          for (std::int64_t a = 1; a <= amax; ++a) {
            if (f[a] < best) {
              best = f[a];
              arg = a;
            }
          }
          const auto idx = static_cast<std::size_t>(y * R + x2 * P + tail);
          cur[idx] = cost[yi] + best;
          if (decide) act[idx] = static_cast<std::uint16_t>(arg);
        }
      }
    });

    if (decide) table->actions[static_cast<std::size_t>(t - L - 1)] = std::move(act);
    table->values[static_cast<std::size_t>(t - L - 1)] = cur;
    next.swap(cur);
  }

  // Periods 1..L: nothing arrives, so the orders only fix the state at L+1.
  const auto& first = table->values.front();
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_idx = 0;
  for (std::int64_t idx = 0; idx < std::min(A + 1, Y + 1) * R; ++idx) {
    if (first[static_cast<std::size_t>(idx)] < best) {
      best = first[static_cast<std::size_t>(idx)];
      best_idx = idx;
    }
  }
  table->opt = best;
  table->first_orders.assign(static_cast<std::size_t>(L), 0);
  table->first_orders[0] = best_idx / R;
  std::int64_t rest = best_idx % R;
  for (std::int64_t i = L - 1; i >= 1; --i) {
    table->first_orders[static_cast<std::size_t>(i)] = rest % K;
    rest /= K;
  }

  DPSolution sol;
  sol.opt = best;
  sol.states = S;
  sol.clip_mass = forward_table(d, *table).clip_mass;
  sol.table = std::move(table);
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (sol.clip_mass > cfg.clip_threshold) {
    throw Error(ErrorCode::CapTooTight, "clipped mass " + std::to_string(sol.clip_mass) +
                                            " exceeds threshold; raise the inventory cap");
  }
  return sol;
}

ForwardResult forward_table(const DemandDistribution& d, const ValueTable& table) {
  const std::int64_t L = table.L, T = table.T, A = table.order_cap, Y = table.inventory_cap;
  const std::int64_t K = A + 1, R = table.rest_size(), P = L >= 2 ? R / K : 1;
  std::vector<double> cost(static_cast<std::size_t>(Y + 1));
  std::vector<std::vector<std::pair<std::int64_t, double>>> leftover(cost.size());
  for (std::int64_t y = 0; y <= Y; ++y) {
    cost[static_cast<std::size_t>(y)] = single_period_cost(d, table.c, table.h, y);
    leftover[static_cast<std::size_t>(y)] = leftover_law(d, y);
  }

  ForwardResult out;
  std::vector<double> dist(static_cast<std::size_t>(table.state_count()), 0.0);
  std::vector<double> next(dist.size());
  std::vector<std::int64_t> rest(table.first_orders.begin() + 1, table.first_orders.end());
  dist[static_cast<std::size_t>(table.index(std::min(table.first_orders[0], Y), rest))] = 1.0;

  for (std::int64_t t = L + 1; t <= T + L; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    const bool decide = t <= T;
    const auto* act = decide ? table.actions[static_cast<std::size_t>(t - L - 1)].data() : nullptr;
    for (std::size_t s = 0; s < dist.size(); ++s) {
      const double m = dist[s];
      if (m == 0.0) continue;
      const auto idx = static_cast<std::int64_t>(s);
      const std::int64_t y = idx / R, digits = idx % R;
      const std::int64_t a = decide ? act[s] : 0;
      out.cost += m * cost[static_cast<std::size_t>(y)];
      const std::int64_t x2 = L >= 2 ? digits / P : a;
      const std::int64_t rest_next = L >= 2 ? (digits % P) * K + a : 0;
      for (const auto& [v, w] : leftover[static_cast<std::size_t>(y)]) {
        std::int64_t yp = v + x2;
        if (yp > Y) {
          out.clip_mass += m * w;
          yp = Y;
        }
        next[static_cast<std::size_t>(yp * R + rest_next)] += m * w;
      }
    }
    dist.swap(next);
  }
  return out;
}

std::pair<double, double> bellman_residual(const DemandDistribution& d, const ValueTable& table,
                                           std::int64_t stride) {
  if (stride < 1) throw Error(ErrorCode::BadParameter, "stride must be >= 1");
  const std::int64_t L = table.L, T = table.T, A = table.order_cap, Y = table.inventory_cap;
  const std::int64_t R = table.rest_size();
  const auto atoms = d.atoms();
  const auto probs = d.probs();
  double residual = 0.0, action_gap = 0.0;
  for (std::int64_t t = L + 1; t <= T + L; ++t) {
    const auto& V = table.values[static_cast<std::size_t>(t - L - 1)];
    const std::vector<double>* Vn =
        t < T + L ? &table.values[static_cast<std::size_t>(t - L)] : nullptr;
    for (std::int64_t idx = 0; idx < table.state_count(); idx += stride) {
      const std::int64_t y = idx / R;
      std::vector<std::int64_t> rest(static_cast<std::size_t>(L - 1));
      std::int64_t digits = idx % R;
      for (std::int64_t i = L - 2; i >= 0; --i) {
        rest[static_cast<std::size_t>(i)] = digits % (A + 1);
        digits /= (A + 1);
      }
      const double here = single_period_cost(d, table.c, table.h, y);
      double best = std::numeric_limits<double>::infinity();
      double chosen = 0.0;
      const std::int64_t stored = t <= T ? table.action(t, y, rest) : 0;
      for (std::int64_t a = 0; a <= (t <= T ? A : 0); ++a) {
        double q = here;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
          const std::int64_t left = std::max<std::int64_t>(y - atoms[k], 0);
          std::int64_t yp;
          std::vector<std::int64_t> rest_next;
          if (L == 1) {
            yp = std::min(left + a, Y);
          } else {
            yp = std::min(left + rest.front(), Y);
            rest_next.assign(rest.begin() + 1, rest.end());
            rest_next.push_back(a);
          }
          if (Vn) q += probs[k] * (*Vn)[static_cast<std::size_t>(table.index(yp, rest_next))];
        }
        best = std::min(best, q);
        if (a == stored) chosen = q;
      }
      const double v = V[static_cast<std::size_t>(idx)];
      residual = std::max(residual, std::abs(v - best));
      action_gap = std::max(action_gap, std::abs(v - chosen));
    }
  }
  return {residual, action_gap};
}

std::int64_t TabularPolicy::order(const DecisionContext& ctx, const SystemState& state,
                                  rng::Stream&) const {
  const auto& tb = *table_;
  if (ctx.L != tb.L || ctx.T != tb.T) throw Error(ErrorCode::BadParameter, "table horizon mismatch");
  if (state.t <= tb.L) return tb.first_orders[static_cast<std::size_t>(state.t - 1)] * ctx.scale;
  if (state.t > tb.T) return 0;
  auto units = [&](std::int64_t ticks) {
    if (ticks % ctx.scale != 0) throw Error(ErrorCode::LatticeMismatch, "state off the table lattice");
    return ticks / ctx.scale;
  };
  const std::int64_t y = std::min(units(state.inventory + state.pipeline.front()), tb.inventory_cap);
  std::vector<std::int64_t> rest;
  for (std::size_t i = 1; i < state.pipeline.size(); ++i) rest.push_back(units(state.pipeline[i]));
  return tb.action(state.t, y, rest) * ctx.scale;
}

PolicyEvaluation evaluate_policy(const Policy& policy, const DemandDistribution& d, double c,
                                 double h, std::int64_t L, std::int64_t T, bool exact,
                                 std::int64_t reps, std::uint64_t root_seed, int threads,
                                 std::int64_t state_budget) {
  if (!(L > 0 && T > L)) throw Error(ErrorCode::BadParameter, "require T > L > 0");
  PolicyEvaluation out;
  if (!exact) {
    const auto s = simulate(policy, d, c, h, L, T, reps, root_seed, threads);
    out.mean = s.mean;
    out.std_error = s.std_error;
    out.reps = s.reps;
    return out;
  }
  out.exact = true;
  const std::int64_t scale = policy.required_scale();
  const DecisionContext ctx{L, T, c, h, &d, scale};
  const double tick = d.unit_value() / static_cast<double>(scale);
  const auto atoms = d.atoms();
  const auto probs = d.probs();
  rng::Stream unused(0);

  // key = (I, x_1, ..., x_L) in ticks
  std::map<std::vector<std::int64_t>, double> dist;
  dist[std::vector<std::int64_t>(static_cast<std::size_t>(L) + 1, 0)] = 1.0;
  double total = 0.0;
  for (std::int64_t t = 1; t <= T + L; ++t) {
    std::map<std::vector<std::int64_t>, double> next;
    OrderLaw first;
    if (t == 1 && policy.randomized_first_order()) first = policy.first_order_law(ctx);
    for (const auto& [key, m] : dist) {
      SystemState st;
      st.t = t;
      st.inventory = key[0];
      st.pipeline.assign(key.begin() + 1, key.end());
      OrderLaw law;
      if (t > T) {
        law = {{0, 1.0}};
      } else if (t == 1 && policy.randomized_first_order()) {
        law = first;
      } else {
        law = {{policy.order(ctx, st, unused), 1.0}};
      }
      for (const auto& [a, pa] : law) {
        std::vector<std::int64_t> nk(key.size());
        for (std::size_t i = 2; i < key.size(); ++i) nk[i - 1] = key[i];
        nk.back() = a;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
          const std::int64_t net = st.inventory + st.pipeline.front() - atoms[k] * scale;
          const double w = m * pa * probs[k];
          if (t >= L + 1) {
            total += w * (h * static_cast<double>(std::max<std::int64_t>(net, 0)) +
                          c * static_cast<double>(std::max<std::int64_t>(-net, 0))) * tick;
          }
          if (t == T + L) continue;
          nk[0] = std::max<std::int64_t>(net, 0);
          next[nk] += w;
        }
      }
    }
    if (static_cast<std::int64_t>(next.size()) > state_budget) {
      throw Error(ErrorCode::StateBudgetExceeded, "exact evaluation exceeded the state budget");
    }
    out.peak_states = std::max<std::int64_t>(out.peak_states, static_cast<std::int64_t>(next.size()));
    dist.swap(next);
  }
  out.mean = total;
  return out;
}

RatioResult opt_ratio(const DemandDistribution& d, double c, double h, const DPConfig& cfg,
                      double z_grid_step) {
  RatioResult out;
  out.dp = solve(d, c, h, cfg);
  const auto zs = best_constant_z(d, c, h, z_grid_step);
  out.opt = out.dp.opt;
  out.z = zs.z;
  out.cost_pi_z = static_cast<double>(cfg.T) * zs.cost;
  out.ratio = out.cost_pi_z / out.opt;
  return out;
}

namespace {

constexpr char kMagic[] = "LSVT1\n";

template <class T>
void write_raw(std::ofstream& os, const T* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
}

template <class T>
void read_raw(std::ifstream& is, T* data, std::size_t n) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
  if (!is) throw Error(ErrorCode::ConfigError, "truncated value table");
}

}  // namespace

void save_table(const ValueTable& table, const std::string& path) {
  nlohmann::json header = {
      {"L", table.L},
      {"T", table.T},
      {"lattice", table.unit.str()},
      {"order_cap", table.order_cap},
      {"inventory_cap", table.inventory_cap},
      {"checksum", table.checksum()},
      {"demand_fingerprint", table.demand_fingerprint},
      {"c", table.c},
      {"h", table.h},
      {"opt", table.opt},
  };
  const std::string text = header.dump();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  os.write(kMagic, sizeof(kMagic) - 1);
  const std::uint64_t len = text.size();
  write_raw(os, &len, 1);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_raw(os, table.first_orders.data(), table.first_orders.size());
  for (const auto& v : table.values) write_raw(os, v.data(), v.size());
  for (const auto& a : table.actions) write_raw(os, a.data(), a.size());
  if (!os) throw Error(ErrorCode::ConfigError, "failed writing " + path);
}

std::shared_ptr<const ValueTable> load_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot read " + path);
  char magic[sizeof(kMagic) - 1];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCode::ConfigError, path + " is not a value table");
  }
  std::uint64_t len = 0;
  read_raw(is, &len, 1);
  if (len > (1u << 20)) throw Error(ErrorCode::ConfigError, "implausible table header");
  std::string text(len, '\0');
  read_raw(is, text.data(), len);
  const auto header = nlohmann::json::parse(text);

  auto table = std::make_shared<ValueTable>();
  table->L = header.at("L").get<std::int64_t>();
  table->T = header.at("T").get<std::int64_t>();
  table->unit = parse_rational(header.at("lattice").get<std::string>());
  table->order_cap = header.at("order_cap").get<std::int64_t>();
  table->inventory_cap = header.at("inventory_cap").get<std::int64_t>();
  table->demand_fingerprint = header.at("demand_fingerprint").get<std::uint64_t>();
  table->c = header.at("c").get<double>();
  table->h = header.at("h").get<double>();
  table->opt = header.at("opt").get<double>();
  if (!(table->L > 0 && table->T > table->L && table->order_cap >= 0 &&
        table->inventory_cap >= table->order_cap)) {
    throw Error(ErrorCode::ConfigError, "inconsistent table header");
  }
  const auto S = static_cast<std::size_t>(table->state_count());
  table->first_orders.resize(static_cast<std::size_t>(table->L));
  read_raw(is, table->first_orders.data(), table->first_orders.size());
  table->values.assign(static_cast<std::size_t>(table->T), std::vector<double>(S));
  for (auto& v : table->values) read_raw(is, v.data(), S);
  table->actions.assign(static_cast<std::size_t>(table->T - table->L), std::vector<std::uint16_t>(S));
  for (auto& a : table->actions) read_raw(is, a.data(), S);
  if (table->checksum() != header.at("checksum").get<std::uint64_t>()) {
    throw Error(ErrorCode::ConfigError, "value table checksum mismatch");
  }
  return table;
}

}  // namespace lostsales
