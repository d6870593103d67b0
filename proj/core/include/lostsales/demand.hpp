#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lostsales/rational.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

/// Finite demand pmf on the lattice {0, u, 2u, ...}. Atoms are stored in
/// lattice units; every moment accessor reports real units (atom * u).
///
/// Instances are immutable once built and may be shared across threads.
class DemandDistribution {
 public:
  /// Validates and builds a distribution. Zero-probability atoms are dropped
  /// and the probabilities are renormalised after the 1e-12 stochasticity
  /// check. Throws NonStochastic, Deterministic, NegativeAtom or BadParameter.
  static DemandDistribution from_pmf(std::vector<std::int64_t> atoms, std::vector<double> probs,
                                     Rational unit = Rational(1));

  std::span<const std::int64_t> atoms() const noexcept { return atoms_; }
  std::span<const double> probs() const noexcept { return probs_; }
  const Rational& unit() const noexcept { return unit_; }
  double unit_value() const noexcept { return unit_.to_double(); }
  std::size_t support_size() const noexcept { return atoms_.size(); }
  std::int64_t min_atom() const noexcept { return atoms_.front(); }
  std::int64_t max_atom() const noexcept { return atoms_.back(); }

  double mean() const noexcept { return mean_; }
  double second_moment() const noexcept { return second_moment_; }
  double variance() const noexcept { return variance_; }
  double sigma() const noexcept { return sigma_; }
  /// E|D - E[D]|^3 / sigma^3.
  double zeta() const noexcept { return zeta_; }
  double third_abs_central_moment() const noexcept { return third_abs_; }

  /// P(D > s) for s in lattice units.
  double prob_greater(std::int64_t s) const noexcept;
  /// E[(s - D)^+] and E[(D - s)^+] in real units, s in lattice units.
  double expected_overage(std::int64_t s) const noexcept;
  double expected_shortage(std::int64_t s) const noexcept;

  /// Probability mass removed when the distribution came from a truncated
  /// family (0 for explicit pmfs).
  double truncated_mass() const noexcept { return truncated_mass_; }
  const std::string& label() const noexcept { return label_; }

  /// Stable 64-bit fingerprint of (unit, atoms, probs).
  std::uint64_t fingerprint() const noexcept;

 private:
  DemandDistribution() = default;
  void cache_moments();

  std::vector<std::int64_t> atoms_;
  std::vector<double> probs_;
  Rational unit_{1};
  double mean_ = 0, second_moment_ = 0, variance_ = 0, sigma_ = 0, zeta_ = 0, third_abs_ = 0;
  double truncated_mass_ = 0;
  std::string label_ = "pmf";

  friend DemandDistribution truncate_geometric(double, double);
  friend DemandDistribution truncate_poisson(double, double);
};

/// P(D = k) = p (1-p)^k truncated at the smallest s with P(D > s) <= tail_mass.
DemandDistribution truncate_geometric(double p, double tail_mass);
/// Poisson(lambda) truncated the same way.
DemandDistribution truncate_poisson(double lambda, double tail_mass);

/// Newsvendor quantities: Q is the c/(c+h) quantile (lattice units), g the
/// single-period cost at Q.
struct NewsvendorScalars {
  std::int64_t q_lattice = 0;
  double q = 0;
  double g = 0;
};

/// Throws BadParameter unless c > 0 and h > 0.
NewsvendorScalars newsvendor(const DemandDistribution& d, double c, double h);

/// h E[(s-D)^+] + c E[(D-s)^+] for on-hand s (lattice units).
double single_period_cost(const DemandDistribution& d, double c, double h, std::int64_t s);

/// Walker alias table; one uniform per draw.
class DemandSampler {
 public:
  explicit DemandSampler(const DemandDistribution& d);

  /// Returns an index into the distribution's atoms.
  std::size_t draw_index(rng::Stream& stream) const noexcept {
    const double x = stream.uniform() * static_cast<double>(prob_.size());
    const auto i = static_cast<std::size_t>(x);
    return (x - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
  }
  /// Draws a demand in lattice units.
  std::int64_t draw(rng::Stream& stream) const noexcept { return atoms_[draw_index(stream)]; }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
  std::vector<std::int64_t> atoms_;
};

/// n i.i.d. draws in lattice units; n = 0 is rejected with BadParameter.
std::vector<std::int64_t> sample(const DemandDistribution& d, rng::Stream& stream, std::size_t n);

}  // namespace lostsales
