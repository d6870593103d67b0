#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/error.hpp"
#include "lostsales/rational.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

/// Integer grid on which a constant-order walk with rate r lives: one lattice
/// unit of demand is split into `scale` ticks so that r is a whole number of
/// ticks (`up`).
struct RateLattice {
  Rational rate;             // lattice units
  std::int64_t scale = 1;    // ticks per lattice unit
  std::int64_t up = 0;       // r in ticks
  double tick = 1.0;         // real size of one tick
};

/// Throws BadParameter for r < 0 and LatticeMismatch when r / unit is not a
/// fraction with denominator <= 2^16.
RateLattice rate_lattice(const DemandDistribution& d, double r);

/// (E[D]-r)^2 / (4 (E[D]^2 + E[D^2])). Throws RateTooHigh for r >= E[D].
double theta(const DemandDistribution& d, double r);

/// Law of sup_{k>=0} (k r - D_1 - ... - D_k) on the tick grid.
struct SupremumSolution {
  double r = 0;
  RateLattice lattice;
  std::vector<double> pmf;       // index = ticks
  std::vector<double> survival;  // survival[i] = P(I >= i ticks)
  double mean = 0;
  double second_moment = 0;
  double residual = 0;  // mass unaccounted for (trimmed tail + convergence estimate)
  std::int64_t iterations = 0;

  double value(std::size_t ticks) const noexcept { return static_cast<double>(ticks) * lattice.tick; }
  /// P(I >= x) with x in ticks.
  double prob_at_least(std::int64_t x) const noexcept {
    if (x <= 0) return survival.empty() ? 0.0 : survival.front();
    return static_cast<std::size_t>(x) < survival.size() ? survival[static_cast<std::size_t>(x)] : 0.0;
  }
};

struct LindleyOptions {
  double tol = 1e-12;                 // total-variation stopping tolerance
  std::int64_t max_iterations = 5'000'000;
  std::size_t max_support = 1u << 24;  // ticks
};

/// Iterates W' = (W + r - D)^+ from the point mass at 0 until successive
/// iterates are within `tol` in total variation (and the geometric estimate
/// of the remaining drift is too). Throws RateTooHigh, LatticeMismatch or
/// NoConvergence.
SupremumSolution stationary_waiting(const DemandDistribution& d, double r,
                                    const LindleyOptions& opts = {});

/// One application of the Lindley map to a pmf on the tick grid of `lattice`.
std::vector<double> lindley_step(const DemandDistribution& d, const RateLattice& lattice,
                                 std::span<const double> pmf);

/// Maximum of values[j] + (j == last ? terminal_bonus : 0) and the LARGEST
/// index attaining it.
template <class T>
std::pair<T, std::size_t> walk_max_argmax(std::span<const T> values, T terminal_bonus) {
  if (values.empty()) throw Error(ErrorCode::BadParameter, "walk_max_argmax on empty sequence");
  const std::size_t last = values.size() - 1;
  T best = values[0] + (last == 0 ? terminal_bonus : T{});
  std::size_t arg = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    const T v = values[j] + (j == last ? terminal_bonus : T{});
    if (v >= best) {
      best = v;
      arg = j;
    }
  }
  return {best, arg};
}

/// Empirical law of the largest argmax of k r - sum D_i over {0, ..., K}.
struct ArgmaxDistribution {
  double r = 0;
  double theta = 0;
  std::int64_t horizon = 0;     // K
  double tail_bound = 0;        // certified bound on P(i >= K+1)
  std::int64_t samples = 0;
  std::vector<std::int64_t> counts;  // size K+1
  std::vector<double> pmf;

  /// Empirical P(i >= k).
  double prob_at_least(std::int64_t k) const;
  /// Binomial standard error of prob_at_least(k).
  double stderr_at_least(std::int64_t k) const;
  /// Empirical pmf of min(k, i) over {0, ..., k}.
  std::vector<double> min_with(std::int64_t k) const;
};

/// Smallest K with theta^-1 (1 - theta)^K <= tail_tol.
std::int64_t argmax_horizon(double theta, double tail_tol);

/// Monte Carlo estimate; the horizon is derived from the geometric tail
/// certificate so every estimate carries a rigorous truncation bound.
ArgmaxDistribution argmax_distribution_mc(const DemandDistribution& d, double r, double tail_tol,
                                          std::int64_t samples, rng::Stream& stream);

/// Exact pmf of i_k (largest argmax of the k-step walk with an independent
/// copy of the supremum added at index k) by enumerating all demand
/// sequences of length k. Throws BudgetExceeded when |support|^k exceeds the
/// budget or k > 8.
std::vector<double> argmax_finite_exact(const DemandDistribution& d, double r, std::int64_t k,
                                        const SupremumSolution& sup,
                                        std::int64_t budget = 50'000'000);

/// One line of a bound-versus-estimate report.
struct BoundCheck {
  std::string bound_name;
  double bound_value = 0;
  double estimate = 0;
  double std_error = 0;
  bool pass = false;
};

struct TailSuiteReport {
  double r = 0;
  double theta = 0;
  std::int64_t horizon = 0;
  std::vector<BoundCheck> checks;
  bool all_pass() const noexcept;
};

struct TailSuiteOptions {
  std::int64_t max_k = 50;       // tail and point checks run for k <= max_k
  double tail_tol = 1e-6;        // sets the MC horizon
  double z_score = 4.0;
};

/// Checks the geometric tail bound, the pointwise Chernoff bound, the
/// double-sum bound (Monte Carlo) and the second-moment bound (exact pmf).
TailSuiteReport verify_tail_suite(const DemandDistribution& d, double r, std::int64_t samples,
                                  rng::Stream& stream, const TailSuiteOptions& opts = {});

}  // namespace lostsales
