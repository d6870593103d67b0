#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lostsales {

/// Reduced fraction with a positive denominator. Used for the lattice unit of
/// a demand distribution and for order rates measured in lattice units.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator*(const Rational& a, const Rational& b);
Rational operator/(const Rational& a, const Rational& b);
Rational operator+(const Rational& a, const Rational& b);

/// Parses "3", "0.25", "-1.5" or "1/4".
Rational parse_rational(std::string_view text);

/// Smallest-denominator fraction within `tol` of x, searching denominators up
/// to max_den. Returns nullopt when x is not commensurate at that resolution.
std::optional<Rational> rationalize(double x, std::int64_t max_den = 1 << 16, double tol = 1e-12);

std::int64_t lcm(std::int64_t a, std::int64_t b);

}  // namespace lostsales
