#pragma once

#include <cstddef>
#include <vector>

namespace pdmp {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(std::size_t n);
  std::size_t size() const noexcept { return nodes.size(); }

  /// Integral of f over [a, b] with this rule.
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) acc += weights[j] * f(mid + half * nodes[j]);
    return half * acc;
  }
};

/// Cached rule; thread-safe after first use of a given size.
const GaussLegendre& gauss_legendre(std::size_t n);

}  // namespace pdmp
