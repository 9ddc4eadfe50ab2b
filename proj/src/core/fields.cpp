// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/fields.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace sgfem
{

SpatialField SpatialField::constant(double value)
{
  if (!std::isfinite(value)) {
    throw NumericError("non-finite constant field");
  }
  SpatialField f;
  f.value_ = value;
  f.sup_norm_ = std::abs(value);
  return f;
}

SpatialField SpatialField::function(std::function<double(Point)> fn, double resolution,
                                    double sup_norm)
{
  SpatialField f;
  f.constant_ = false;
  f.f_ = std::move(fn);
  f.resolution_ = resolution;
  f.sup_norm_ = sup_norm;
  return f;
}

SpatialField &SpatialField::with_support(Point centre, double radius)
{
  support_ = std::make_pair(centre, radius);
  return *this;
}

bool SpatialField::vanishes_on(const Triangle &t) const
{
  if (constant_) {
    return value_ == 0.0;
  }
  if (!support_) {
    return false;
  }
  const auto [c, r] = *support_;
  // distance from the centre to the closed triangle
  const double area2 = cross(t[1] - t[0], t[2] - t[0]);
  bool inside = true;
  for (int k = 0; k < 3; ++k) {
    const Point &p = t[k];
    const Point &q = t[(k + 1) % 3];
    if (cross(q - p, c - p) * area2 < 0.0) {
      inside = false;
    }
  }
  if (inside) {
    return false;
  }
  double dist = INFINITY;
  for (int k = 0; k < 3; ++k) {
    const Point &p = t[k];
    const Point d = t[(k + 1) % 3] - p;
    const double s = std::clamp(dot(c - p, d) / dot(d, d), 0.0, 1.0);
    dist = std::min(dist, norm(c - (p + s * d)));
  }
  return dist >= r;
}

SpatialField SpatialField::scaled(double s) const
{
  if (constant_) {
    return constant(s * value_);
  }
  SpatialField f = *this;
  f.f_ = [g = f_, s](Point x) { return s * g(x); };
  f.sup_norm_ = std::abs(s) * sup_norm_;
  return f;
}

CoefficientExpansion::CoefficientExpansion(SpatialField mean, std::vector<SpatialField> terms,
                                           double a0_min, double a0_max)
  : mean_(std::move(mean)), terms_(std::move(terms)), a0_min_(a0_min), a0_max_(a0_max)
{
  if (!(a0_min_ > 0.0) || !(a0_max_ >= a0_min_)) {
    throw InputError("mean field bounds must satisfy 0 < a0_min <= a0_max");
  }
  double sum = 0.0;
  for (const auto &t : terms_) {
    sum += t.sup_norm();
  }
  tau_ = sum / a0_min_;
  if (!(tau_ < 1.0)) {
    throw InputError("coefficient expansion is not uniformly elliptic (tau = " +
                     std::to_string(tau_) + ")");
  }
}

const SpatialField &CoefficientExpansion::field(int m) const
{
  if (m == 0) {
    return mean_;
  }
  if (m < 0 || m > max_terms()) {
    throw LimitError("expansion term " + std::to_string(m) + " exceeds the truncation length " +
                     std::to_string(max_terms()));
  }
  return terms_[m - 1];
}

double CoefficientExpansion::evaluate(Point x, const std::vector<double> &y) const
{
  double a = mean_(x);
  for (std::size_t m = 0; m < y.size() && m < terms_.size(); ++m) {
    a += y[m] * terms_[m](x);
  }
  return a;
}

FunctionalSpec FunctionalSpec::scaled(double s) const
{
  FunctionalSpec out;
  out.scalar = scalar.scaled(s);
  out.vector = vector;
  for (auto &v : out.vector) {
    v.value = s * v.value;
  }
  return out;
}

std::vector<int> region_elements(const Triangulation &mesh, const Triangle &region)
{
  const double area = std::abs(signed_area(region));
  const double orient = signed_area(region) > 0.0 ? 1.0 : -1.0;
  const double tol = 1e-12 * diameter(region);
  auto inside = [&](Point x) {
    for (int k = 0; k < 3; ++k) {
      const Point &p = region[k];
      const Point &q = region[(k + 1) % 3];
      if (orient * cross(q - p, x - p) / norm(q - p) < -tol) {
        return false;
      }
    }
    return true;
  };
  std::vector<int> out;
  double covered = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Triangle t = mesh.triangle(e);
    const Point centroid = (1.0 / 3.0) * (t[0] + t[1] + t[2]);
    if (!inside(centroid)) {
      continue;
    }
    if (!inside(t[0]) || !inside(t[1]) || !inside(t[2])) {
      throw InputError("region is not a union of mesh elements (element " + std::to_string(e) +
                       " straddles its boundary)");
    }
    out.push_back(mesh.root(e));
    covered += std::abs(signed_area(t));
  }
  if (std::abs(covered - area) > 1e-10 * area) {
    throw InputError("region is not a union of mesh elements (covered area " +
                     std::to_string(covered) + " of " + std::to_string(area) + ")");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FunctionalSpec bind_regions(const FunctionalSpec &spec, const Triangulation &mesh)
{
  FunctionalSpec out = spec;
  for (auto &part : out.vector) {
    part.roots = region_elements(mesh, part.region);
  }
  return out;
}

}  // namespace sgfem
