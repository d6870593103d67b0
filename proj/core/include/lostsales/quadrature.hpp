#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lostsales::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on the Legendre recurrence).
const Rule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels = 8,
                 std::size_t nodes = 64);

/// Standard normal density and cdf.
double normal_pdf(double x);
double normal_cdf(double x);

/// E[max(0, N + y)] for standard normal N, by quadrature of (x + y) phi(x)
/// over [-y, -y + 40] on 64-node panels.
double psi(double y);

}  // namespace lostsales::quad
