// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/quadrature.hpp"

#include <numbers>
#include <utility>

#include "core/error.hpp"

namespace sgfem
{

namespace
{

// P_n(x) and its derivative, by the three-term recurrence.
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussRule gauss_legendre(int n)
{
  if (n < 1) {
    throw InputError("Gauss-Legendre rule needs at least one point");
  }
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

GaussRule composite_gauss_legendre(double a, double b, int panels, int order)
{
  const GaussRule base = gauss_legendre(order);
  GaussRule rule;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int q = 0; q < order; ++q) {
      rule.nodes.push_back(mid + 0.5 * h * base.nodes[q]);
      rule.weights.push_back(0.5 * h * base.weights[q]);
    }
  }
  return rule;
}

}  // namespace sgfem
