// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_MESH_HPP
#define SGFEM_CORE_MESH_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/quadrature.hpp"

namespace sgfem
{

// Unordered vertex pair, stored with v0 < v1.
struct EdgeKey
{
  int v0 = 0;
  int v1 = 0;

  EdgeKey() = default;
  EdgeKey(int a, int b) : v0(a < b ? a : b), v1(a < b ? b : a) {}
  auto operator<=>(const EdgeKey &) const = default;
};

//
// Conforming triangulation with derived edge and boundary tables. Immutable once built.
// Local edge k of an element joins its vertices k and (k+1)%3.
//
class Triangulation
{
public:
  Triangulation() = default;
  Triangulation(std::vector<Point> vertices, std::vector<std::array<int, 3>> elements,
                std::vector<int> roots = {});

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_elements() const { return static_cast<int>(elements_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_interior_vertices() const { return static_cast<int>(interior_vertices_.size()); }

  const std::vector<Point> &vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>> &elements() const { return elements_; }
  const std::vector<EdgeKey> &edges() const { return edges_; }

  const Point &vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3> &element(int e) const { return elements_[e]; }
  Triangle triangle(int e) const;
  int root(int e) const { return roots_[e]; }

  const EdgeKey &edge(int i) const { return edges_[i]; }
  const std::array<int, 3> &element_edges(int e) const { return element_edges_[e]; }
  // Second entry is -1 on the boundary.
  const std::array<int, 2> &edge_elements(int i) const { return edge_elements_[i]; }
  bool boundary_edge(int i) const { return edge_elements_[i][1] < 0; }
  bool boundary_vertex(int v) const { return boundary_vertex_[v]; }
  double edge_length(int i) const;

  // Edge id or -1.
  int find_edge(const EdgeKey &key) const;
  std::vector<int> interior_edges() const;

  // Position of the vertex among the interior vertices, -1 on the boundary.
  int dof(int v) const { return dof_[v]; }
  const std::vector<int> &interior_vertices() const { return interior_vertices_; }

  // Local index (0..2) of the edge that gets bisected first.
  int refinement_edge(int e) const { return refinement_edge_[e]; }

  double min_angle() const;

  // Process-unique id, used as a cache key.
  std::uint64_t id() const { return id_; }

private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<int> roots_;
  std::vector<EdgeKey> edges_;
  std::vector<std::array<int, 3>> element_edges_;
  std::vector<std::array<int, 2>> edge_elements_;
  std::vector<char> boundary_vertex_;
  std::vector<int> dof_;
  std::vector<int> interior_vertices_;
  std::vector<int> refinement_edge_;
  std::uint64_t id_ = 0;
};

// Local node numbering of a fully bisected element: a, b, c with ab the refinement edge,
// then the midpoints m of ab, p of bc and q of ca.
struct ElementSplit
{
  std::array<int, 3> corner;     // local vertex positions of a, b, c
  std::array<int, 3> mid_edge;   // local edge indices carrying m, p, q
  static constexpr std::array<std::array<int, 3>, 4> children = {{
    {0, 3, 5},
    {5, 3, 2},
    {3, 1, 4},
    {3, 4, 2},
  }};
};

ElementSplit element_split(const Triangulation &mesh, int e);

struct Refinement
{
  Triangulation mesh;
  std::vector<EdgeKey> bisected;  // interior edges of the input that were split (sorted)
  std::vector<int> parent;        // parent element of each new element
};

/// Coarsest conforming longest-edge refinement bisecting every edge in `marked`.
Refinement refine(const Triangulation &mesh, const std::vector<EdgeKey> &marked);

/// Interior edges that `refine` would bisect.
std::vector<EdgeKey> virtual_refined_set(const Triangulation &mesh,
                                         const std::vector<EdgeKey> &marked);

struct DetailStructure
{
  std::vector<int> edge;         // interior edge id of the coarse mesh, one per detail function
  std::vector<int> midpoint;     // vertex id of its midpoint in the uniform refinement
  std::vector<int> detail_of_edge;  // inverse map, -1 for boundary edges
  std::vector<double> denominator;  // d(E); filled by assembly
  int overlap = 0;                  // K
};

DetailStructure detail_structure(const Triangulation &mesh);

struct UniformRefinement
{
  Triangulation fine;
  DetailStructure detail;
};

/// Splits every element into four children.
UniformRefinement uniform_refine(const Triangulation &mesh);

// Plain-text asset: "n_vertices n_elements", then "x y boundary_flag" lines, then "v0 v1 v2"
// lines. '#' starts a comment.
Triangulation read_mesh(std::istream &in);
Triangulation read_mesh_file(const std::string &path);
void write_mesh(std::ostream &out, const Triangulation &mesh);

Triangulation square_mesh();
Triangulation lshape_mesh();
Triangulation slit_mesh(double delta);

}  // namespace sgfem

#endif  // SGFEM_CORE_MESH_HPP
