// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "core/assembly.hpp"
#include "core/error.hpp"
#include "core/mesh.hpp"

using namespace sgfem;

namespace
{

Triangulation two_triangles()
{
  return Triangulation({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
}

// unit square with both diagonals: four elements around the centre
Triangulation four_triangles()
{
  return Triangulation({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}},
                       {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

double total_area(const Triangulation &m)
{
  double a = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    a += signed_area(m.triangle(e));
  }
  return a;
}

// No vertex may sit inside an edge of an element (no hanging nodes); every edge has one
// or two neighbours and the areas are positive.
void check_conforming(const Triangulation &m)
{
  int bad = 0;
  for (int e = 0; e < m.n_elements(); ++e) {
    bad += signed_area(m.triangle(e)) <= 0.0;
  }
  for (int i = 0; i < m.n_edges(); ++i) {
    const Point a = m.vertex(m.edge(i).v0);
    const Point b = m.vertex(m.edge(i).v1);
    for (int v = 0; v < m.n_vertices(); ++v) {
      if (v == m.edge(i).v0 || v == m.edge(i).v1) {
        continue;
      }
      const Point p = m.vertex(v);
      const double c = cross(b - a, p - a);
      const double s = dot(p - a, b - a) / dot(b - a, b - a);
      bad += std::abs(c) < 1e-12 && s > 1e-12 && s < 1 - 1e-12;
    }
  }
  REQUIRE(bad == 0);
  int boundary = 0;
  for (int i = 0; i < m.n_edges(); ++i) {
    boundary += m.boundary_edge(i);
  }
  // Euler: V - E + F = 1 for a simply connected polygon
  CHECK(m.n_vertices() - m.n_edges() + m.n_elements() == 1);
  CHECK(boundary > 0);
}

}  // namespace

TEST_CASE("triangulation validation")
{
  CHECK_THROWS_AS(Triangulation({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), InputError);
  CHECK_THROWS_AS(Triangulation({{0, 0}, {1, 0}, {0, 1}, {5, 5}}, {{0, 1, 2}}), InputError);
  CHECK_THROWS_AS(Triangulation({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 3}}), InputError);
  // clockwise input is reoriented
  const Triangulation t({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}});
  CHECK(signed_area(t.triangle(0)) == doctest::Approx(0.5));
}

TEST_CASE("topology of the embedded meshes")
{
  const Triangulation sq = square_mesh();
  CHECK(sq.n_vertices() == 25);
  CHECK(sq.n_elements() == 32);
  CHECK(sq.n_interior_vertices() == 9);
  CHECK(total_area(sq) == doctest::Approx(4.0));
  const Triangulation l = lshape_mesh();
  CHECK(l.n_elements() == 24);
  CHECK(l.n_interior_vertices() == 5);
  CHECK(total_area(l) == doctest::Approx(3.0));
  const Triangulation s = slit_mesh(0.005);
  CHECK(s.n_elements() == 16);
  CHECK(total_area(s) == doctest::Approx(4.0 - 0.005));
  CHECK(s.boundary_vertex(0));  // slit tip
  for (const auto *m : {&sq, &l, &s}) {
    check_conforming(*m);
    CHECK(m->min_angle() > 0.0);
  }
}

TEST_CASE("edge lookup and neighbours")
{
  const Triangulation m = two_triangles();
  CHECK(m.n_edges() == 5);
  const int d = m.find_edge(EdgeKey(2, 0));
  REQUIRE(d >= 0);
  CHECK_FALSE(m.boundary_edge(d));
  CHECK(m.find_edge(EdgeKey(1, 3)) == -1);
  CHECK(m.interior_edges() == std::vector<int>{d});
  CHECK(m.edge_length(d) == doctest::Approx(std::sqrt(2.0)));
  // the diagonal is the longest edge of both triangles
  CHECK(m.element_edges(0)[m.refinement_edge(0)] == d);
  CHECK(m.element_edges(1)[m.refinement_edge(1)] == d);
}

TEST_CASE("marking the shared edge of a triangle pair")
{
  const Triangulation m = two_triangles();
  const Refinement r = refine(m, {EdgeKey(0, 2)});
  CHECK(r.mesh.n_elements() == 4);
  CHECK(r.bisected == std::vector<EdgeKey>{EdgeKey(0, 2)});
  CHECK(virtual_refined_set(m, {EdgeKey(0, 2)}) == r.bisected);
  CHECK(r.mesh.vertex(4).x == doctest::Approx(0.5));
  CHECK(r.mesh.vertex(4).y == doctest::Approx(0.5));
  check_conforming(r.mesh);
}

TEST_CASE("empty marking is the identity")
{
  const Triangulation m = square_mesh();
  const Refinement r = refine(m, {});
  CHECK(r.bisected.empty());
  CHECK(r.mesh.vertices().size() == m.vertices().size());
  CHECK(r.mesh.elements() == m.elements());
  CHECK(virtual_refined_set(m, {}).empty());
}

TEST_CASE("refinement rejects boundary and unknown edges")
{
  const Triangulation m = two_triangles();
  CHECK_THROWS_AS(refine(m, {EdgeKey(0, 1)}), InputError);
  CHECK_THROWS_AS(refine(m, {EdgeKey(1, 3)}), InputError);
}

TEST_CASE("every single-edge marking of the four-element square stays conforming")
{
  const Triangulation base = four_triangles();
  for (int i : base.interior_edges()) {
    Triangulation m = base;
    std::vector<EdgeKey> marks = {base.edge(i)};
    // cascade: keep marking the first interior edge touching the newest vertex
    for (int level = 0; level < 6; ++level) {
      const Refinement r = refine(m, marks);
      CHECK(r.mesh.n_elements() >= m.n_elements() + static_cast<int>(r.bisected.size()));
      CHECK(r.mesh.n_vertices() >= m.n_vertices() + static_cast<int>(r.bisected.size()));
      CHECK(total_area(r.mesh) == doctest::Approx(1.0).epsilon(1e-13));
      check_conforming(r.mesh);
      CHECK(virtual_refined_set(m, marks) == r.bisected);
      m = r.mesh;
      const int newest = m.n_vertices() - 1;
      marks.clear();
      for (int j : m.interior_edges()) {
        if (m.edge(j).v0 == newest || m.edge(j).v1 == newest) {
          marks.push_back(m.edge(j));
          break;
        }
      }
      if (marks.empty()) {
        break;
      }
    }
  }
}

TEST_CASE("random refinement sequences keep shape regularity and nesting")
{
  std::mt19937 rng(7);
  Triangulation m = lshape_mesh();
  const double angle0 = m.min_angle();
  for (int level = 0; level < 8; ++level) {
    const auto interior = m.interior_edges();
    std::vector<EdgeKey> marks;
    for (int i : interior) {
      if (rng() % 5 == 0) {
        marks.push_back(m.edge(i));
      }
    }
    const Refinement r = refine(m, marks);
    check_conforming(r.mesh);
    // newest-vertex style bisection of the longest edge never degrades below half the angle
    CHECK(r.mesh.min_angle() >= 0.5 * angle0 - 1e-12);
    for (int e = 0; e < r.mesh.n_elements(); ++e) {
      const int p = r.parent[e];
      REQUIRE(p >= 0);
      CHECK(r.mesh.root(e) == m.root(p));
    }
    // idempotent on its closure
    CHECK(refine(r.mesh, {}).mesh.n_elements() == r.mesh.n_elements());
    m = r.mesh;
  }
}

TEST_CASE("uniform refinement and detail structure")
{
  const Triangulation two = two_triangles();
  const UniformRefinement u2 = uniform_refine(two);
  CHECK(u2.fine.n_elements() == 8);
  CHECK(u2.detail.edge.size() == two.interior_edges().size());
  CHECK(u2.fine.n_interior_vertices() == 1);
  const std::vector<Triangulation> meshes = {two, square_mesh(), slit_mesh(0.01)};
  for (const auto &m : meshes) {
    const UniformRefinement u = uniform_refine(m);
    CHECK(u.fine.n_elements() == 4 * m.n_elements());
    CHECK(u.fine.n_vertices() == m.n_vertices() + m.n_edges());
    check_conforming(u.fine);
    for (std::size_t j = 0; j < u.detail.edge.size(); ++j) {
      const EdgeKey k = m.edge(u.detail.edge[j]);
      const Point mid = midpoint(m.vertex(k.v0), m.vertex(k.v1));
      const Point p = u.fine.vertex(u.detail.midpoint[j]);
      CHECK(p.x == doctest::Approx(mid.x));
      CHECK(p.y == doctest::Approx(mid.y));
      CHECK(u.detail.detail_of_edge[u.detail.edge[j]] == static_cast<int>(j));
    }
    int overlap = 0;
    for (int e = 0; e < m.n_elements(); ++e) {
      int c = 0;
      for (int i : m.element_edges(e)) {
        c += !m.boundary_edge(i);
      }
      overlap = std::max(overlap, c);
    }
    CHECK(u.detail.overlap == overlap);
  }
}

TEST_CASE("detail energies for a0 = 1 match direct assembly on the refined mesh")
{
  const Triangulation m = square_mesh();
  const UniformRefinement u = uniform_refine(m);
  const SparseMatrix k = stiffness(u.fine, SpatialField::constant(1.0));
  auto coarse = std::make_shared<const Triangulation>(m);
  const TwoLevelDiscretization disc(coarse);
  const FieldMatrices fm = disc.assemble(SpatialField::constant(1.0));
  for (int j = 0; j < disc.n_details(); ++j) {
    const int fd = u.fine.dof(u.detail.midpoint[j]);
    CHECK(fm.detail_diagonal[j] == doctest::Approx(k.coeff(fd, fd)).epsilon(1e-13));
  }
  // right triangles with legs h: every interior detail hat has energy 4 on this mesh
  CHECK(fm.detail_diagonal.maxCoeff() == doctest::Approx(4.0));
}

TEST_CASE("mesh files round trip")
{
  const Triangulation m = refine(lshape_mesh(), {lshape_mesh().edge(lshape_mesh().interior_edges()[0])}).mesh;
  std::stringstream ss;
  write_mesh(ss, m);
  const Triangulation back = read_mesh(ss);
  CHECK(back.elements() == m.elements());
  REQUIRE(back.n_vertices() == m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) {
    CHECK(back.vertex(v).x == m.vertex(v).x);
    CHECK(back.vertex(v).y == m.vertex(v).y);
    CHECK(back.boundary_vertex(v) == m.boundary_vertex(v));
  }
}

TEST_CASE("mesh file diagnostics")
{
  std::stringstream empty;
  CHECK_THROWS_AS(read_mesh(empty), InputError);
  std::stringstream short_file("3 1\n0 0 1\n1 0 1\n");
  CHECK_THROWS_AS(read_mesh(short_file), InputError);
  // a vertex flagged interior that lies on the boundary
  std::stringstream wrong_flag("3 1\n0 0 1\n1 0 0\n0 1 1\n0 1 2\n");
  CHECK_THROWS_AS(read_mesh(wrong_flag), InputError);
  std::stringstream ok("# triangle\n3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 2\n");
  CHECK(read_mesh(ok).n_elements() == 1);
  CHECK_THROWS_AS(read_mesh_file("/nonexistent/mesh.txt"), IoError);
}
