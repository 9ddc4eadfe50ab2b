// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_ASSEMBLY_HPP
#define SGFEM_CORE_ASSEMBLY_HPP

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "core/fields.hpp"
#include "core/mesh.hpp"

namespace sgfem
{

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Element-quadrature stiffness matrix over the interior vertices.
SparseMatrix stiffness(const Triangulation &mesh, const SpatialField &field);

/// Element-quadrature load vector over the interior vertices.
Vector load(const Triangulation &mesh, const FunctionalSpec &spec);

/// Nodal interpolation from the P1 space of `coarse` into that of its uniform refinement.
SparseMatrix uniform_prolongation(const Triangulation &coarse, const Triangulation &fine);

struct FieldMatrices
{
  SparseMatrix coarse;           // int a grad phi_i . grad phi_j
  RowSparseMatrix detail;        // int a grad phi_E . grad phi_i
  Vector detail_diagonal;        // int a |grad phi_E|^2
};

struct LoadVectors
{
  Vector coarse;
  Vector detail;
};

//
// P1 space on a triangulation together with the detail hats of its uniform refinement.
// Every field integral is taken on the four children of each element, so the coarse
// matrices are exactly the Galerkin restriction of the fine ones.
//
class TwoLevelDiscretization
{
public:
  explicit TwoLevelDiscretization(std::shared_ptr<const Triangulation> mesh);

  const Triangulation &mesh() const { return *mesh_; }
  std::shared_ptr<const Triangulation> mesh_ptr() const { return mesh_; }
  const DetailStructure &detail() const { return detail_; }
  int n_dofs() const { return mesh_->n_interior_vertices(); }
  int n_details() const { return static_cast<int>(detail_.edge.size()); }

  FieldMatrices assemble(const SpatialField &field, bool with_details = true) const;
  LoadVectors assemble(const FunctionalSpec &spec, bool with_details = true) const;

private:
  struct ElementData
  {
    std::array<int, 3> dof;         // coarse dofs of a, b, c (or -1)
    std::array<int, 3> detail;      // detail ids of m, p, q (or -1)
    std::array<Point, 6> node;      // a, b, c, m, p, q
    std::array<Point, 3> grad;      // coarse barycentric gradients for a, b, c
    std::array<double, 4> child_area;
    std::array<std::array<Point, 3>, 4> mid_grad;  // gradient of the m, p, q hats per child
    std::array<int, 9> coarse_pos;  // value slot of (i, j) in the coarse pattern
    std::array<int, 9> detail_pos;  // value slot of (mid, j) in the detail pattern
  };

  Triangle child(const ElementData &d, int k) const;
  std::array<double, 4> child_integrals(const ElementData &d, const SpatialField &field) const;

  std::shared_ptr<const Triangulation> mesh_;
  DetailStructure detail_;
  std::vector<ElementData> elements_;
  SparseMatrix coarse_pattern_;
  RowSparseMatrix detail_pattern_;
};

}  // namespace sgfem

#endif  // SGFEM_CORE_ASSEMBLY_HPP
