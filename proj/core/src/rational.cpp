#include "lostsales/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "lostsales/error.hpp"

namespace lostsales {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error(ErrorCode::BadParameter, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const auto g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num * b.num, a.den * b.den);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw Error(ErrorCode::BadParameter, "division by zero rational");
  return Rational(a.num * b.den, a.den * b.num);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

std::int64_t lcm(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::BadParameter, "cannot parse integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::BadParameter, "empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const bool negative = text.front() == '-';
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    if (frac_part.size() > 15) throw Error(ErrorCode::BadParameter, "too many decimals");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    std::int64_t whole = 0;
    if (!int_part.empty() && int_part != "-" && int_part != "+") whole = parse_int(int_part);
    const std::int64_t frac = frac_part.empty() ? 0 : parse_int(frac_part);
    const std::int64_t magnitude = (whole < 0 ? -whole : whole) * scale + frac;
    return Rational(negative ? -magnitude : magnitude, scale);
  }
  return Rational(parse_int(text));
}

std::optional<Rational> rationalize(double x, std::int64_t max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  const double slack = tol * std::max(1.0, std::abs(x));
  for (std::int64_t q = 1; q <= max_den; ++q) {
    const double p = std::round(x * static_cast<double>(q));
    if (std::abs(p / static_cast<double>(q) - x) <= slack) {
      return Rational(static_cast<std::int64_t>(p), q);
    }
  }
  return std::nullopt;
}

}  // namespace lostsales
