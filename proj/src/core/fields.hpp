// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_FIELDS_HPP
#define SGFEM_CORE_FIELDS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/mesh.hpp"
#include "core/quadrature.hpp"

namespace sgfem
{

//
// Scalar field on the physical domain. Smooth non-constant fields declare a resolution
// length; element quadrature subdivides until pieces are no larger than that.
//
class SpatialField
{
public:
  SpatialField() = default;

  static SpatialField constant(double value);
  static SpatialField function(std::function<double(Point)> f, double resolution, double sup_norm);

  double operator()(Point x) const { return constant_ ? value_ : f_(x); }
  bool is_constant() const { return constant_; }
  double constant_value() const { return value_; }
  double resolution() const { return resolution_; }
  // Bound on |f| over the domain.
  double sup_norm() const { return sup_norm_; }

  // Declares that the field vanishes outside the closed disc.
  SpatialField &with_support(Point centre, double radius);
  bool vanishes_on(const Triangle &t) const;

  SpatialField scaled(double s) const;

private:
  bool constant_ = true;
  double value_ = 0.0;
  std::function<double(Point)> f_;
  double resolution_ = 0.0;
  double sup_norm_ = 0.0;
  std::optional<std::pair<Point, double>> support_;
};

//
// a(x, y) = a_0(x) + sum_m y_m a_m(x), truncated after max_terms() terms.
//
class CoefficientExpansion
{
public:
  CoefficientExpansion() = default;
  CoefficientExpansion(SpatialField mean, std::vector<SpatialField> terms, double a0_min,
                       double a0_max);

  // m = 0 is the mean field.
  const SpatialField &field(int m) const;
  int max_terms() const { return static_cast<int>(terms_.size()); }
  double a0_min() const { return a0_min_; }
  double a0_max() const { return a0_max_; }
  double tau() const { return tau_; }
  double lambda() const { return a0_min_ / (a0_max_ * (1.0 + tau_)); }
  double Lambda() const { return a0_max_ / (a0_min_ * (1.0 - tau_)); }

  double evaluate(Point x, const std::vector<double> &y) const;

private:
  SpatialField mean_;
  std::vector<SpatialField> terms_;
  double a0_min_ = 1.0;
  double a0_max_ = 1.0;
  double tau_ = 0.0;
};

// Constant vector part on a triangle that is a union of initial-mesh elements. `roots` lists
// those elements by root id.
struct VectorPart
{
  Triangle region;
  std::vector<int> roots;
  Point value;
};

//
// v -> int f0 v - int f . grad v
//
struct FunctionalSpec
{
  SpatialField scalar;  // f0
  std::vector<VectorPart> vector;

  bool scalar_is_zero() const { return scalar.is_constant() && scalar.constant_value() == 0.0; }
  FunctionalSpec scaled(double s) const;
};

/// Initial elements whose union is the given triangle; input error if it is not such a union.
std::vector<int> region_elements(const Triangulation &mesh, const Triangle &region);

/// Re-resolves the vector-part regions against the roots of `mesh`.
FunctionalSpec bind_regions(const FunctionalSpec &spec, const Triangulation &mesh);

}  // namespace sgfem

#endif  // SGFEM_CORE_FIELDS_HPP
