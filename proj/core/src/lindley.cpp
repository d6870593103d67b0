#include "lostsales/lindley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lostsales {

RateLattice rate_lattice(const DemandDistribution& d, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorCode::BadParameter, "order rate must be >= 0");
  const auto in_units = rationalize(r / d.unit_value());
  if (!in_units) {
    throw Error(ErrorCode::LatticeMismatch,
                "rate " + std::to_string(r) + " is not commensurate with the demand lattice");
  }
  RateLattice out;
  out.rate = *in_units;
  out.scale = in_units->den;
  out.up = in_units->num;
  out.tick = d.unit_value() / static_cast<double>(out.scale);
  return out;
}

double theta(const DemandDistribution& d, double r) {
  if (!(r >= 0.0)) throw Error(ErrorCode::BadParameter, "order rate must be >= 0");
  if (r >= d.mean()) throw Error(ErrorCode::RateTooHigh, "r must be below E[D]");
  const double gap = d.mean() - r;
  return gap * gap / (4.0 * (d.mean() * d.mean() + d.second_moment()));
}

namespace {

// Shifts (ticks) applied by one Lindley step for each demand atom.
std::vector<std::int64_t> step_shifts(const DemandDistribution& d, const RateLattice& lat) {
  std::vector<std::int64_t> shifts(d.support_size());
  for (std::size_t i = 0; i < shifts.size(); ++i) shifts[i] = lat.up - d.atoms()[i] * lat.scale;
  return shifts;
}

void apply_step(std::span<const double> pmf, std::span<const std::int64_t> shifts,
                std::span<const double> probs, std::int64_t up, std::vector<double>& next) {
  const auto len = static_cast<std::int64_t>(pmf.size());
  next.assign(static_cast<std::size_t>(len + up), 0.0);
  for (std::size_t a = 0; a < shifts.size(); ++a) {
    const std::int64_t shift = shifts[a];
    const double p = probs[a];
    // w + shift <= 0 collapses to the empty-system state.
    const std::int64_t split = std::clamp<std::int64_t>(-shift + 1, 0, len);
    double to_zero = 0.0;
    for (std::int64_t w = 0; w < split; ++w) to_zero += pmf[static_cast<std::size_t>(w)];
    next[0] += p * to_zero;
    double* out = next.data() + shift;
    const double* in = pmf.data();
    for (std::int64_t w = split; w < len; ++w) out[w] += p * in[w];
  }
}

}  // namespace

std::vector<double> lindley_step(const DemandDistribution& d, const RateLattice& lattice,
                                 std::span<const double> pmf) {
  std::vector<double> next;
  const auto shifts = step_shifts(d, lattice);
  apply_step(pmf, shifts, d.probs(), lattice.up, next);
  return next;
}

SupremumSolution stationary_waiting(const DemandDistribution& d, double r,
                                    const LindleyOptions& opts) {
  if (r >= d.mean()) throw Error(ErrorCode::RateTooHigh, "r must be below E[D]");
  SupremumSolution sol;
  sol.r = r;
  sol.lattice = rate_lattice(d, r);
  const auto shifts = step_shifts(d, sol.lattice);

  std::vector<double> pmf{1.0};
  std::vector<double> next;
  // Tail entries carrying less than this are dropped; the dropped mass is
  // accumulated into the residual.
  const double trim = opts.tol * 1e-6;
  double dropped = 0.0;
  double prev_diff = std::numeric_limits<double>::infinity();
  double remaining = std::numeric_limits<double>::infinity();

  std::int64_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    apply_step(pmf, shifts, d.probs(), sol.lattice.up, next);

    double tail = 0.0;
    while (next.size() > 1 && tail + next.back() < trim) {
      tail += next.back();
      next.pop_back();
    }
    dropped += tail;
    if (next.size() > opts.max_support) {
      throw Error(ErrorCode::NoConvergence, "supremum support exceeded max_support");
    }

    double diff = 0.0;
    const std::size_t common = std::min(pmf.size(), next.size());
    for (std::size_t i = 0; i < common; ++i) diff += std::abs(next[i] - pmf[i]);
    for (std::size_t i = common; i < next.size(); ++i) diff += next[i];
    for (std::size_t i = common; i < pmf.size(); ++i) diff += pmf[i];
    diff *= 0.5;

    pmf.swap(next);
    if (diff == 0.0) {
      remaining = 0.0;
      ++it;
      break;
    }
    const double rho = diff / prev_diff;
    remaining = rho < 1.0 ? diff * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    prev_diff = diff;
    if (diff < opts.tol && remaining < opts.tol) {
      ++it;
      break;
    }
  }
  if (it >= opts.max_iterations && remaining >= opts.tol) {
    throw Error(ErrorCode::NoConvergence, "Lindley iteration budget exhausted");
  }

  sol.iterations = it;
  sol.residual = dropped + remaining;
  sol.pmf = std::move(pmf);
  sol.survival.assign(sol.pmf.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = sol.pmf.size(); i-- > 0;) {
    acc += sol.pmf[i];
    sol.survival[i] = acc;
  }
  for (std::size_t i = 0; i < sol.pmf.size(); ++i) {
    const double v = sol.value(i);
    sol.mean += sol.pmf[i] * v;
    sol.second_moment += sol.pmf[i] * v * v;
  }
  return sol;
}

double ArgmaxDistribution::prob_at_least(std::int64_t k) const {
  if (k <= 0) return 1.0;
  if (k > horizon) return 0.0;
  double p = 0.0;
  for (auto j = static_cast<std::size_t>(k); j < pmf.size(); ++j) p += pmf[j];
  return p;
}

double ArgmaxDistribution::stderr_at_least(std::int64_t k) const {
  const double p = prob_at_least(k);
  return samples > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) : 0.0;
}

std::vector<double> ArgmaxDistribution::min_with(std::int64_t k) const {
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    out[std::min<std::size_t>(j, static_cast<std::size_t>(k))] += pmf[j];
  }
  return out;
}

std::int64_t argmax_horizon(double th, double tail_tol) {
  if (!(th > 0.0 && th < 1.0)) throw Error(ErrorCode::BadParameter, "theta must lie in (0,1)");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw Error(ErrorCode::BadParameter, "tail_tol in (0,1)");
  auto k = static_cast<std::int64_t>(
      std::max(0.0, std::ceil(std::log(tail_tol * th) / std::log1p(-th))));
  while (k > 0 && std::pow(1.0 - th, static_cast<double>(k - 1)) / th <= tail_tol) --k;
  while (std::pow(1.0 - th, static_cast<double>(k)) / th > tail_tol) ++k;
  return k;
}

ArgmaxDistribution argmax_distribution_mc(const DemandDistribution& d, double r, double tail_tol,
                                          std::int64_t samples, rng::Stream& stream) {
  if (samples < 1) throw Error(ErrorCode::BadParameter, "need at least one sample");
  ArgmaxDistribution out;
  out.r = r;
  out.theta = theta(d, r);
  out.horizon = argmax_horizon(out.theta, tail_tol);
  out.tail_bound = std::pow(1.0 - out.theta, static_cast<double>(out.horizon + 1)) / out.theta;
  out.samples = samples;
  out.counts.assign(static_cast<std::size_t>(out.horizon) + 1, 0);

  const auto lat = rate_lattice(d, r);
  const auto shifts = step_shifts(d, lat);
  const DemandSampler sampler(d);
  const std::int64_t horizon = out.horizon;
  for (std::int64_t s = 0; s < samples; ++s) {
    std::int64_t walk = 0, best = 0, arg = 0;
    for (std::int64_t k = 1; k <= horizon; ++k) {
      walk += shifts[sampler.draw_index(stream)];
      if (walk >= best) {
        best = walk;
        arg = k;
      }
    }
    ++out.counts[static_cast<std::size_t>(arg)];
  }
  out.pmf.resize(out.counts.size());
  for (std::size_t j = 0; j < out.counts.size(); ++j) {
    out.pmf[j] = static_cast<double>(out.counts[j]) / static_cast<double>(samples);
  }
  return out;
}

std::vector<double> argmax_finite_exact(const DemandDistribution& d, double r, std::int64_t k,
                                        const SupremumSolution& sup, std::int64_t budget) {
  if (k < 0) throw Error(ErrorCode::BadParameter, "horizon must be >= 0");
  if (k > 8) throw Error(ErrorCode::BudgetExceeded, "exact argmax enumeration limited to k <= 8");
  const auto lat = rate_lattice(d, r);
  if (!(lat.rate == sup.lattice.rate)) {
    throw Error(ErrorCode::BadParameter, "supremum solution was computed for a different rate");
  }
  std::vector<double> pmf(static_cast<std::size_t>(k) + 1, 0.0);
  if (k == 0) {
    pmf[0] = 1.0;
    return pmf;
  }
  const auto n = static_cast<double>(d.support_size());
  if (std::pow(n, static_cast<double>(k)) > static_cast<double>(budget)) {
    throw Error(ErrorCode::BudgetExceeded, "support^k exceeds enumeration budget");
  }
  const auto shifts = step_shifts(d, lat);
  const auto probs = d.probs();

  std::vector<std::size_t> digits(static_cast<std::size_t>(k), 0);
  std::vector<std::int64_t> walk(static_cast<std::size_t>(k) + 1, 0);
  while (true) {
    double weight = 1.0;
    for (std::int64_t j = 1; j <= k; ++j) {
      const auto dj = digits[static_cast<std::size_t>(j - 1)];
      walk[static_cast<std::size_t>(j)] = walk[static_cast<std::size_t>(j - 1)] + shifts[dj];
      weight *= probs[dj];
    }
    // Largest argmax over the indices before k, with ties to the larger index.
    std::int64_t best = walk[0];
    std::size_t arg = 0;
    for (std::size_t j = 1; j < static_cast<std::size_t>(k); ++j) {
      if (walk[j] >= best) {
        best = walk[j];
        arg = j;
      }
    }
    // Index k wins whenever walk[k] + I >= best (ties go to k).
    const double p_last = sup.prob_at_least(best - walk[static_cast<std::size_t>(k)]);
    pmf[static_cast<std::size_t>(k)] += weight * p_last;
    pmf[arg] += weight * (1.0 - p_last);

    std::size_t pos = 0;
    while (pos < digits.size() && ++digits[pos] == d.support_size()) digits[pos++] = 0;
    if (pos == digits.size()) break;
  }
  return pmf;
}

bool TailSuiteReport::all_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

TailSuiteReport verify_tail_suite(const DemandDistribution& d, double r, std::int64_t samples,
                                  rng::Stream& stream, const TailSuiteOptions& opts) {
  TailSuiteReport rep;
  rep.r = r;
  rep.theta = theta(d, r);
  const double th = rep.theta;
  const auto dist = argmax_distribution_mc(d, r, opts.tail_tol, samples, stream);
  rep.horizon = dist.horizon;
  const auto n = static_cast<double>(samples);

  const std::int64_t kmax = std::min(opts.max_k, dist.horizon);
  for (std::int64_t k = 0; k <= kmax; ++k) {
    BoundCheck tail;
    tail.bound_name = "tail_geometric[k=" + std::to_string(k) + "]";
    tail.bound_value = std::pow(1.0 - th, static_cast<double>(k)) / th;
    tail.estimate = dist.prob_at_least(k);
    tail.std_error = dist.stderr_at_least(k);
    tail.pass = tail.estimate <= tail.bound_value + opts.z_score * tail.std_error;
    rep.checks.push_back(tail);
  }
  for (std::int64_t k = 0; k <= kmax; ++k) {
    BoundCheck point;
    point.bound_name = "point_chernoff[k=" + std::to_string(k) + "]";
    point.bound_value = std::pow(1.0 - th, static_cast<double>(k));
    point.estimate = dist.pmf[static_cast<std::size_t>(k)];
    point.std_error = std::sqrt(point.estimate * (1.0 - point.estimate) / n);
    point.pass = point.estimate <= point.bound_value + opts.z_score * point.std_error;
    rep.checks.push_back(point);
  }

  // sum_k sum_{j>=k} P(i >= j) = E[(i+1)(i+2)/2]
  {
    double mean = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < dist.pmf.size(); ++j) {
      const double v = 0.5 * static_cast<double>(j + 1) * static_cast<double>(j + 2);
      mean += dist.pmf[j] * v;
      sq += dist.pmf[j] * v * v;
    }
    BoundCheck c;
    c.bound_name = "double_sum";
    c.bound_value = std::pow(th, -3.0);
    c.estimate = mean;
    c.std_error = std::sqrt(std::max(0.0, sq - mean * mean) / n);
    c.pass = c.estimate <= c.bound_value;
    rep.checks.push_back(c);
  }
  {
    const auto sup = stationary_waiting(d, r);
    BoundCheck c;
    c.bound_name = "second_moment";
    c.bound_value = 2.0 * std::pow(th, -3.0) * d.mean() * d.mean();
    c.estimate = sup.second_moment;
    c.std_error = 0.0;
    c.pass = c.estimate <= c.bound_value;
    rep.checks.push_back(c);
  }
  {
    BoundCheck c;
    c.bound_name = "truncation_certificate";
    c.bound_value = opts.tail_tol;
    c.estimate = dist.tail_bound;
    c.pass = dist.tail_bound <= opts.tail_tol;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace lostsales
