#pragma once

#include <cstdint>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/rng.hpp"

// Reference computations that share no code path with the library routines
// they are compared against.
namespace lostsales::oracle {

/// Mean of sup_k (X_1 + ... + X_k) for an i.i.d. walk whose largest step is +1
/// (upward skip-free). P(sup >= n) = eta^n with eta the root in (0, 1) of
/// E[eta^-X] = 1, found by bisection. Steps are integers; tick converts to
/// real units.
double skip_free_supremum_mean(const std::vector<std::int64_t>& steps, const std::vector<double>& probs,
                               double tick);

/// Same root; exposed for reporting.
double skip_free_eta(const std::vector<std::int64_t>& steps, const std::vector<double>& probs);

/// Minimum expected window cost over every deterministic history-dependent
/// policy with orders in {0, ..., max_order} (lattice units), found by
/// listing every policy and every demand path. Throws BudgetExceeded when
/// policies * paths exceeds `budget`.
double brute_force_policy_tree(const DemandDistribution& d, double c, double h, std::int64_t L,
                               std::int64_t T, std::int64_t max_order, std::int64_t budget = 200'000'000);

/// Monte Carlo counts of the argmax of j r - D_1 - ... - D_j over
/// {0, ..., horizon}, with r = up / scale lattice units. `largest` selects the
/// tie-break.
std::vector<std::int64_t> argmax_counts(const DemandDistribution& d, std::int64_t scale, std::int64_t up,
                                        std::int64_t horizon, std::int64_t samples, bool largest,
                                        rng::Stream& stream);

/// E[max(0, N + y)] = phi(y) + y Phi(y).
double normal_positive_part(double y);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace lostsales::oracle
