#include "lostsales/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "lostsales/error.hpp"

namespace lostsales {

namespace {

constexpr double kStochasticTol = 1e-12;
// Slack used when comparing a tail probability against the critical ratio,
// so that exactly representable ties such as 0.5 <= 0.5 are not lost to
// rounding in the cumulative sums.
constexpr double kQuantileTol = 1e-12;

}  // namespace

DemandDistribution DemandDistribution::from_pmf(std::vector<std::int64_t> atoms,
                                                std::vector<double> probs, Rational unit) {
  if (atoms.size() != probs.size() || atoms.empty()) {
    throw Error(ErrorCode::BadParameter, "atoms and probs must be non-empty and of equal length");
  }
  if (unit.num <= 0) throw Error(ErrorCode::BadParameter, "lattice unit must be positive");

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return atoms[a] < atoms[b]; });

  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i] < 0) throw Error(ErrorCode::NegativeAtom, "atom " + std::to_string(atoms[i]));
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      throw Error(ErrorCode::NonStochastic, "probabilities must be finite and non-negative");
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kStochasticTol) {
    throw Error(ErrorCode::NonStochastic, "probabilities sum to " + std::to_string(total));
  }

  DemandDistribution d;
  d.unit_ = unit;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto i = order[k];
    if (k > 0 && atoms[i] == atoms[order[k - 1]]) {
      throw Error(ErrorCode::BadParameter, "duplicate atom " + std::to_string(atoms[i]));
    }
    if (probs[i] > 0.0) {
      d.atoms_.push_back(atoms[i]);
      d.probs_.push_back(probs[i] / total);
    }
  }
  if (d.atoms_.size() < 2) {
    throw Error(ErrorCode::Deterministic, "demand must have at least two atoms with positive mass");
  }
  d.cache_moments();
  return d;
}

void DemandDistribution::cache_moments() {
  const double u = unit_value();
  mean_ = 0.0;
  second_moment_ = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double v = static_cast<double>(atoms_[i]) * u;
    mean_ += probs_[i] * v;
    second_moment_ += probs_[i] * v * v;
  }
  variance_ = 0.0;
  third_abs_ = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double dev = static_cast<double>(atoms_[i]) * u - mean_;
    variance_ += probs_[i] * dev * dev;
    third_abs_ += probs_[i] * std::abs(dev) * dev * dev;
  }
  sigma_ = std::sqrt(variance_);
  zeta_ = third_abs_ / (variance_ * sigma_);
}

double DemandDistribution::prob_greater(std::int64_t s) const noexcept {
  double p = 0.0;
  for (std::size_t i = atoms_.size(); i-- > 0;) {
    if (atoms_[i] <= s) break;
    p += probs_[i];
  }
  return p;
}

double DemandDistribution::expected_overage(std::int64_t s) const noexcept {
  double e = 0.0;
  for (std::size_t i = 0; i < atoms_.size() && atoms_[i] < s; ++i) {
    e += probs_[i] * static_cast<double>(s - atoms_[i]);
  }
  return e * unit_value();
}

double DemandDistribution::expected_shortage(std::int64_t s) const noexcept {
  double e = 0.0;
  for (std::size_t i = atoms_.size(); i-- > 0;) {
    if (atoms_[i] <= s) break;
    e += probs_[i] * static_cast<double>(atoms_[i] - s);
  }
  return e * unit_value();
}

std::uint64_t DemandDistribution::fingerprint() const noexcept {
  std::uint64_t h = rng::mix64(static_cast<std::uint64_t>(unit_.num) * 31 +
                               static_cast<std::uint64_t>(unit_.den));
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(double));
    std::memcpy(&bits, &probs_[i], sizeof(bits));
    h = rng::mix64(h ^ static_cast<std::uint64_t>(atoms_[i]));
    h = rng::mix64(h ^ bits);
  }
  return h;
}

DemandDistribution truncate_geometric(double p, double tail_mass) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadParameter, "geometric p must lie in (0,1)");
  if (!(tail_mass > 0.0 && tail_mass <= 1e-6)) {
    throw Error(ErrorCode::BadParameter, "tail_mass must lie in (0, 1e-6]");
  }
  const double q = 1.0 - p;
  // P(D > s) = q^(s+1)
  std::int64_t s = 0;
  double tail = q;
  while (tail > tail_mass) {
    ++s;
    tail *= q;
  }
  std::vector<std::int64_t> atoms(static_cast<std::size_t>(s) + 1);
  std::vector<double> probs(atoms.size());
  double mass = p;
  for (std::int64_t k = 0; k <= s; ++k) {
    atoms[static_cast<std::size_t>(k)] = k;
    probs[static_cast<std::size_t>(k)] = mass;
    mass *= q;
  }
  const double kept = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (auto& x : probs) x /= kept;
  auto d = DemandDistribution::from_pmf(std::move(atoms), std::move(probs));
  d.truncated_mass_ = tail;
  d.label_ = "geometric(p=" + std::to_string(p) + ")";
  return d;
}

DemandDistribution truncate_poisson(double lambda, double tail_mass) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::BadParameter, "poisson lambda must be positive");
  }
  if (!(tail_mass > 0.0 && tail_mass <= 1e-6)) {
    throw Error(ErrorCode::BadParameter, "tail_mass must lie in (0, 1e-6]");
  }
  // Enumerate far past the mode, then accumulate tails from the top so small
  // tails are not computed as 1 - cdf.
  const auto n = static_cast<std::size_t>(lambda + 60.0 * std::sqrt(lambda) + 60.0);
  std::vector<double> pmf(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    pmf[k] = std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                      std::lgamma(static_cast<double>(k) + 1.0));
  }
  std::vector<double> upper(n + 2, 0.0);  // upper[k] = P(D >= k)
  for (std::size_t k = n + 1; k-- > 0;) upper[k] = upper[k + 1] + pmf[k];
  std::size_t s = 0;
  while (s < n && upper[s + 1] > tail_mass) ++s;

  std::vector<std::int64_t> atoms(s + 1);
  std::vector<double> probs(s + 1);
  double kept = 0.0;
  for (std::size_t k = 0; k <= s; ++k) {
    atoms[k] = static_cast<std::int64_t>(k);
    probs[k] = pmf[k];
    kept += pmf[k];
  }
  for (auto& x : probs) x /= kept;
  auto d = DemandDistribution::from_pmf(std::move(atoms), std::move(probs));
  d.truncated_mass_ = upper[s + 1];
  d.label_ = "poisson(lambda=" + std::to_string(lambda) + ")";
  return d;
}

NewsvendorScalars newsvendor(const DemandDistribution& d, double c, double h) {
  if (!(c > 0.0 && h > 0.0)) throw Error(ErrorCode::BadParameter, "c and h must be positive");
  const double critical = h / (c + h);
  NewsvendorScalars out;
  // P(D > s) is a right-continuous step function with jumps at the atoms, so
  // the real infimum is either 0 or one of the atoms.
  std::int64_t q = 0;
  if (d.prob_greater(0) > critical + kQuantileTol) {
    for (auto a : d.atoms()) {
      if (a > 0 && d.prob_greater(a) <= critical + kQuantileTol) {
        q = a;
        break;
      }
    }
  }
  out.q_lattice = q;
  out.q = static_cast<double>(q) * d.unit_value();
  out.g = single_period_cost(d, c, h, q);
  return out;
}

double single_period_cost(const DemandDistribution& d, double c, double h, std::int64_t s) {
  return h * d.expected_overage(s) + c * d.expected_shortage(s);
}

DemandSampler::DemandSampler(const DemandDistribution& d)
    : prob_(d.support_size()), alias_(d.support_size()), atoms_(d.atoms().begin(), d.atoms().end()) {
  const std::size_t n = prob_.size();
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = d.probs()[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (auto i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::vector<std::int64_t> sample(const DemandDistribution& d, rng::Stream& stream, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadParameter, "sample count must be at least 1");
  DemandSampler sampler(d);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = sampler.draw(stream);
  return out;
}

}  // namespace lostsales
