#include "lostsales/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "lostsales/error.hpp"

namespace lostsales::quad {

const Rule& gauss_legendre(std::size_t n) {
  static std::map<std::size_t, Rule> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  if (n == 0) throw Error(ErrorCode::BadParameter, "quadrature needs at least one node");
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels,
                 std::size_t nodes) {
  if (panels == 0) throw Error(ErrorCode::BadParameter, "need at least one panel");
  const Rule& rule = gauss_legendre(nodes);
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
    total += 0.5 * width * s;
  }
  return total;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double psi(double y) {
  return integrate([y](double x) { return (x + y) * normal_pdf(x); }, -y, -y + 40.0, 16, 64);
}

}  // namespace lostsales::quad
