#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

/// ceil((26 (3 zeta + c E[D] / (h sigma) + 1))^2)
double constant_m(const DemandDistribution& d, double c, double h);

struct ThresholdY {
  double eps = 0;
  double value = 0;
  double linear_term = 0;     // the eps^-1 argument
  double quadratic_term = 0;  // the eps^-2 argument
  std::string binding;        // "eps^-1" or "eps^-2"
};

/// Throws BadEpsilon unless 0 < eps < 1.
ThresholdY threshold_y(const DemandDistribution& d, double c, double h, double eps);

struct Theorem1Certificate {
  double eps = 0;
  std::int64_t L = 0;
  std::int64_t T = 0;
  ThresholdY y;
  double required_L = 0;  // ceil(y(eps))
  double required_T = 0;  // (1 + 3/eps) L
  bool L_ok = false;
  bool T_ok = false;
  bool hypotheses_met = false;
  double promised_ratio = 0;  // 1 + eps when the hypotheses hold
  bool desk_reproducible = false;
  std::string statement;
};

Theorem1Certificate theorem1_certificate(const DemandDistribution& d, double c, double h,
                                         std::int64_t L, std::int64_t T, double eps);

struct LowerBoundOptions {
  std::int64_t exhaustive_limit = 250'000;  // box size below which every lattice point is tried
  std::int64_t starts = 16;
  std::int64_t evaluation_budget = 5'000'000;
  double inventory_box_factor = 2.0;  // multiple of the inventory cap searched
};

/// Minimiser of the L-window cost over x in [0, Q]^L and inventory I >= 0.
/// Quantities are lattice units.
struct LowerBoundSolution {
  std::int64_t L = 0;
  std::vector<std::int64_t> x;
  std::int64_t I = 0;
  double unit = 1;
  double objective = 0;
  double r_star = 0;  // real units
  bool r_star_below_mean = false;
  // telemetry
  bool exhaustive = false;
  std::int64_t evaluations = 0;
  std::int64_t starts = 0;
  std::int64_t sweeps = 0;
  double second_best = 0;  // best objective among the other local optima (== objective if none)
  std::int64_t inventory_box = 0;
  bool inventory_on_boundary = false;
  std::uint64_t seed = 0;

  std::vector<double> x_real() const;
  double I_real() const { return static_cast<double>(I) * unit; }
};

/// The objective is evaluated exactly by propagating the inventory
/// distribution. It is piecewise linear with breakpoints on interval sums of
/// (I, x), so a lattice minimiser exists and only lattice points are searched.
LowerBoundSolution lower_bound_optimize(const DemandDistribution& d, double c, double h,
                                        std::int64_t L, rng::Stream& stream,
                                        const LowerBoundOptions& opts = {});

struct Estimate {
  double mean = 0;
  double std_error = 0;
};

/// Statistics gathered from one set of coupled samples: each sample draws
/// D_1..D_L and an independent copy of the supremum at r*.
struct CoupledEstimates {
  std::int64_t samples = 0;
  std::int64_t violations = 0;  // samples/k where V_k falls below the term at i_k
  Estimate direct;              // h sum V_k + c-term
  Estimate refined;             // h sum (x-sum at i_k - D-sum at i_k) + c-term
  Estimate pi_rstar;            // h sum W_k + c L (E[D] - r*)
  Estimate gap;                 // pi_rstar - refined, per sample
  Estimate final_inventory;     // I*_{L+1}
  double mean_argmax = 0;       // average of i_k over k and samples
};

/// Throws RStarDegenerate when r* >= E[D].
CoupledEstimates coupled_evaluation(const DemandDistribution& d, double c, double h,
                                    const LowerBoundSolution& sol, std::int64_t samples,
                                    rng::Stream& stream);

Estimate refined_lower_bound(const DemandDistribution& d, double c, double h,
                             const LowerBoundSolution& sol, std::int64_t samples, rng::Stream& stream);

std::int64_t coupling_check(const DemandDistribution& d, const LowerBoundSolution& sol,
                            std::int64_t samples, rng::Stream& stream);

struct GapReport {
  double r_star = 0;
  double theta = 0;
  double q = 0;
  double inventory = 0;          // I* in real units
  double lower_bound_exact = 0;  // optimiser objective
  double pi_rstar_exact = 0;     // L * stationary cost at r*
  Estimate pi_rstar;
  Estimate refined;
  Estimate direct;
  Estimate gap;
  double certified_bound = 0;
  std::int64_t violations = 0;
  bool refined_below_pi = false;
  bool pass = false;
};

GapReport gap_certificate(const DemandDistribution& d, double c, double h,
                          const LowerBoundSolution& sol, std::int64_t samples, rng::Stream& stream);

struct InventoryCapReport {
  double inventory = 0;
  double cap_scaled = 0;   // (ceil(sqrt(2 c L / h)) + 2) E[D]
  double cap_unscaled = 0; // c (ceil(sqrt(2 c L / h)) + 2)
  bool pass_scaled = false;
  bool pass_unscaled = false;
};

/// The scaled form is the one that bounds the optimiser box.
double inventory_cap(const DemandDistribution& d, double c, double h, std::int64_t L);
InventoryCapReport inventory_cap_check(const DemandDistribution& d, double c, double h,
                                       std::int64_t L, const LowerBoundSolution& sol);

struct RStarMarginReport {
  std::int64_t L = 0;
  double required_L = 0;  // 8 (Q / sigma + 1) m^{3/2}
  bool hypothesis_met = false;
  double margin = 0;      // E[D] - r*
  double guaranteed_margin = 0;  // sigma m^{-1/2} / 2
  bool margin_at_least_guaranteed = false;
  bool r_star_below_mean = false;
  std::string note;
};

RStarMarginReport rstar_margin_check(const DemandDistribution& d, double c, double h,
                                     std::int64_t L, const LowerBoundSolution& sol);

struct SteinReport {
  std::int64_t n = 0;
  double shift = 0;
  double mc_mean = 0;
  double mc_std_error = 0;
  double normal_mean = 0;
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
};

/// F(x) = max(0, x + shift) applied to n^{-1/2} sum of standardised demands.
SteinReport stein_check(const DemandDistribution& d, double shift, std::int64_t n,
                        std::int64_t samples, rng::Stream& stream);

struct NormalConstantReport {
  double expectation = 0;  // E[max(0, N - 1)]
  double reciprocal = 0;
  bool pass = false;       // reciprocal <= 13
};
NormalConstantReport normal_constant_check();

struct ConstantsReport {
  double mean = 0;
  double sigma = 0;
  double zeta = 0;
  double q = 0;
  double g = 0;
  double z = 0;
  double m = 0;
  std::vector<std::pair<double, double>> theta;  // (r, Theta_r)
  std::vector<ThresholdY> y;
};

ConstantsReport compute_constants(const DemandDistribution& d, double c, double h,
                                  const std::vector<double>& rates, const std::vector<double>& eps);

}  // namespace lostsales
