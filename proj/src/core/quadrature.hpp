// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_QUADRATURE_HPP
#define SGFEM_CORE_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace sgfem
{

struct Point
{
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

using Triangle = std::array<Point, 3>;

inline double signed_area(const Triangle &t) { return 0.5 * cross(t[1] - t[0], t[2] - t[0]); }

inline double diameter(const Triangle &t)
{
  return std::max({norm(t[1] - t[0]), norm(t[2] - t[1]), norm(t[0] - t[2])});
}

// Gradients of the three barycentric coordinates (constant over the triangle).
inline std::array<Point, 3> barycentric_gradients(const Triangle &t)
{
  const double twice_area = cross(t[1] - t[0], t[2] - t[0]);
  std::array<Point, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Point &p = t[(k + 1) % 3];
    const Point &q = t[(k + 2) % 3];
    // rotate the opposite edge by -90 degrees
    g[k] = {(p.y - q.y) / twice_area, (q.x - p.x) / twice_area};
  }
  return g;
}

struct GaussRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [-1, 1].
GaussRule gauss_legendre(int n);

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels of `order` points.
GaussRule composite_gauss_legendre(double a, double b, int panels, int order);

// Symmetric 7-point rule of polynomial degree 5 (Dunavant). Weights sum to one.
struct TriangleRule
{
  static constexpr int size = 7;
  static constexpr double a1 = 0.059715871789769820, b1 = 0.470142064105115090;
  static constexpr double a2 = 0.797426985353087322, b2 = 0.101286507323456339;
  static constexpr double w0 = 0.225000000000000000;
  static constexpr double w1 = 0.132394152788506181;
  static constexpr double w2 = 0.125939180544827153;
  static constexpr std::array<std::array<double, 3>, 7> bary = {{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
    {a1, b1, b1},
    {b1, a1, b1},
    {b1, b1, a1},
    {a2, b2, b2},
    {b2, a2, b2},
    {b2, b2, a2},
  }};
  static constexpr std::array<double, 7> weight = {w0, w1, w1, w1, w2, w2, w2};
};

/// Number of uniform subdivision levels needed so that sub-triangles have diameter <= resolution.
inline int subdivision_levels(const Triangle &t, double resolution)
{
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    return 0;
  }
  int levels = 0;
  double d = diameter(t);
  while (d > resolution && levels < 7) {
    d *= 0.5;
    ++levels;
  }
  return levels;
}

/// Visit quadrature points of `t`, subdividing uniformly until pieces are no larger than
/// `resolution`. The callback receives the physical point, the absolute weight and the
/// barycentric coordinates of the point relative to `t`.
template <typename Visit>
void integrate_triangle(const Triangle &t, double resolution, Visit &&visit)
{
  const double area = std::abs(signed_area(t));
  const int levels = subdivision_levels(t, resolution);
  const int n = 1 << levels;
  const double sub_area = area / static_cast<double>(n * n);
  const double h = 1.0 / static_cast<double>(n);
  auto emit = [&](std::array<double, 2> r0, std::array<double, 2> r1, std::array<double, 2> r2) {
    for (int q = 0; q < TriangleRule::size; ++q) {
      const auto &b = TriangleRule::bary[q];
      const double s = b[0] * r0[0] + b[1] * r1[0] + b[2] * r2[0];
      const double u = b[0] * r0[1] + b[1] * r1[1] + b[2] * r2[1];
      const std::array<double, 3> lam = {1.0 - s - u, s, u};
      const Point x = {lam[0] * t[0].x + lam[1] * t[1].x + lam[2] * t[2].x,
                       lam[0] * t[0].y + lam[1] * t[1].y + lam[2] * t[2].y};
      visit(x, sub_area * TriangleRule::weight[q], lam);
    }
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i + j < n; ++i) {
      const double s = i * h, u = j * h;
      emit({s, u}, {s + h, u}, {s, u + h});
      if (i + j + 1 < n) {
        emit({s + h, u}, {s + h, u + h}, {s, u + h});
      }
    }
  }
}

}  // namespace sgfem

#endif  // SGFEM_CORE_QUADRATURE_HPP
