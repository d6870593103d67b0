#include "lostsales/app/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lostsales/error.hpp"

namespace lostsales::oracle {

double skip_free_eta(const std::vector<std::int64_t>& steps, const std::vector<double>& probs) {
  if (steps.empty() || steps.size() != probs.size()) throw Error(ErrorCode::BadParameter, "bad step law");
  if (*std::max_element(steps.begin(), steps.end()) != 1) {
    throw Error(ErrorCode::BadParameter, "walk is not upward skip-free");
  }
  // f(eta) = E[eta^-X] - 1 has roots at 1 and at eta in (0, 1) when the drift is negative
  auto f = [&](double eta) {
    double s = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) s += probs[i] * std::pow(eta, -static_cast<double>(steps[i]));
    return s - 1.0;
  };
  double lo = 1e-12, hi = 1.0;
  // move hi off the trivial root toward where f < 0
  double probe = 0.5;
  for (int i = 0; i < 200 && f(hi - probe) >= 0; ++i) probe *= 0.5;
  hi -= probe;
  if (f(hi) >= 0) throw Error(ErrorCode::NoConvergence, "no interior root");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double skip_free_supremum_mean(const std::vector<std::int64_t>& steps, const std::vector<double>& probs,
                               double tick) {
  const double eta = skip_free_eta(steps, probs);
  return tick * eta / (1.0 - eta);
}

double brute_force_policy_tree(const DemandDistribution& d, double c, double h, std::int64_t L,
                               std::int64_t T, std::int64_t max_order, std::int64_t budget) {
  const auto atoms = d.atoms();
  const auto probs = d.probs();
  const auto s = static_cast<std::int64_t>(atoms.size());
  const std::int64_t periods = T + L;
  const double u = d.unit_value();

  // decision node for period t and demand history of length t-1
  std::vector<std::int64_t> offset(static_cast<std::size_t>(T) + 2, 0);
  std::int64_t width = 1;
  for (std::int64_t t = 1; t <= T; ++t) {
    offset[static_cast<std::size_t>(t) + 1] = offset[static_cast<std::size_t>(t)] + width;
    width *= s;
  }
  const std::int64_t nodes = offset[static_cast<std::size_t>(T) + 1];

  std::int64_t paths = 1;
  for (std::int64_t t = 0; t < periods; ++t) paths *= s;
  double policies = std::pow(static_cast<double>(max_order + 1), static_cast<double>(nodes));
  if (policies * static_cast<double>(paths) > static_cast<double>(budget)) {
    throw Error(ErrorCode::BudgetExceeded, "policy tree too large");
  }

  // every demand path with its probability and the node visited in each period
  std::vector<double> path_prob(static_cast<std::size_t>(paths));
  std::vector<std::int64_t> path_demand(static_cast<std::size_t>(paths * periods));
  std::vector<std::int64_t> path_node(static_cast<std::size_t>(paths * std::max<std::int64_t>(T, 1)));
  for (std::int64_t p = 0; p < paths; ++p) {
    std::int64_t rem = p;
    double pr = 1.0;
    std::int64_t hist = 0;
    for (std::int64_t t = 1; t <= periods; ++t) {
      const std::int64_t k = rem % s;
      rem /= s;
      if (t <= T) path_node[static_cast<std::size_t>(p * T + t - 1)] = offset[static_cast<std::size_t>(t)] + hist;
      hist = hist * s + k;
      pr *= probs[static_cast<std::size_t>(k)];
      path_demand[static_cast<std::size_t>(p * periods + t - 1)] = atoms[static_cast<std::size_t>(k)];
    }
    path_prob[static_cast<std::size_t>(p)] = pr;
  }

  std::vector<std::int64_t> policy(static_cast<std::size_t>(nodes), 0);
  std::vector<std::int64_t> orders(static_cast<std::size_t>(T));
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double total = 0;
    for (std::int64_t p = 0; p < paths; ++p) {
      for (std::int64_t t = 1; t <= T; ++t) {
        orders[static_cast<std::size_t>(t - 1)] = policy[static_cast<std::size_t>(path_node[static_cast<std::size_t>(p * T + t - 1)])];
      }
      std::int64_t inv = 0;
      double cost = 0;
      for (std::int64_t t = 1; t <= periods; ++t) {
        const std::int64_t src = t - L;
        const std::int64_t on_hand = inv + (src >= 1 && src <= T ? orders[static_cast<std::size_t>(src - 1)] : 0);
        const std::int64_t dem = path_demand[static_cast<std::size_t>(p * periods + t - 1)];
        const std::int64_t lost = std::max<std::int64_t>(0, dem - on_hand);
        inv = std::max<std::int64_t>(0, on_hand - dem);
        if (t >= L + 1) cost += h * static_cast<double>(inv) * u + c * static_cast<double>(lost) * u;
      }
      total += path_prob[static_cast<std::size_t>(p)] * cost;
    }
    best = std::min(best, total);

    std::size_t i = 0;
    while (i < policy.size() && ++policy[i] > max_order) policy[i++] = 0;
    if (i == policy.size()) break;
  }
  return best;
}

std::vector<std::int64_t> argmax_counts(const DemandDistribution& d, std::int64_t scale, std::int64_t up,
                                        std::int64_t horizon, std::int64_t samples, bool largest,
                                        rng::Stream& stream) {
  const auto atoms = d.atoms();
  const auto probs = d.probs();
  std::vector<double> cdf(probs.size());
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) cdf[i] = (acc += probs[i]);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(horizon) + 1, 0);
  for (std::int64_t n = 0; n < samples; ++n) {
    std::int64_t walk = 0, best = 0, arg = 0;
    for (std::int64_t j = 1; j <= horizon; ++j) {
      const double x = stream.uniform();
      auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
      k = std::min(k, atoms.size() - 1);
      walk += up - atoms[k] * scale;
      if (walk > best || (largest && walk == best)) {
        best = walk;
        arg = j;
      }
    }
    ++counts[static_cast<std::size_t>(arg)];
  }
  return counts;
}

double normal_positive_part(double y) {
  const double pdf = std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-y / std::sqrt(2.0));
  return pdf + y * cdf;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    s += std::abs(a - b);
  }
  return 0.5 * s;
}

}  // namespace lostsales::oracle
