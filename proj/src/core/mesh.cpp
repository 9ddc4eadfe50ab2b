// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "core/error.hpp"

namespace sgfem
{

namespace
{

std::atomic<std::uint64_t> next_mesh_id{1};

double squared_length(const Point &p, const Point &q)
{
  const Point d = q - p;
  return dot(d, d);
}

// Longest edge wins; nearly equal lengths fall back to the smaller vertex pair.
int longest_local_edge(const std::vector<Point> &x, const std::array<int, 3> &v)
{
  int best = 0;
  double best_len = squared_length(x[v[0]], x[v[1]]);
  for (int k = 1; k < 3; ++k) {
    const double len = squared_length(x[v[k]], x[v[(k + 1) % 3]]);
    const double tol = 1e-12 * std::max(len, best_len);
    if (len > best_len + tol ||
        (std::abs(len - best_len) <= tol &&
         EdgeKey(v[k], v[(k + 1) % 3]) < EdgeKey(v[best], v[(best + 1) % 3]))) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

}  // namespace

Triangulation::Triangulation(std::vector<Point> vertices, std::vector<std::array<int, 3>> elements,
                             std::vector<int> roots)
  : vertices_(std::move(vertices)), elements_(std::move(elements)), roots_(std::move(roots))
{
  const int nv = n_vertices();
  const int ne = n_elements();
  if (ne == 0) {
    throw InputError("triangulation has no elements");
  }
  if (roots_.empty()) {
    roots_.resize(ne);
    for (int e = 0; e < ne; ++e) {
      roots_[e] = e;
    }
  }
  if (static_cast<int>(roots_.size()) != ne) {
    throw InputError("root table does not match the element count");
  }
  for (const auto &p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InputError("non-finite vertex coordinate");
    }
  }
  std::vector<char> used(nv, 0);
  for (int e = 0; e < ne; ++e) {
    auto &v = elements_[e];
    for (int k = 0; k < 3; ++k) {
      if (v[k] < 0 || v[k] >= nv) {
        throw InputError("element " + std::to_string(e) + " references vertex " +
                         std::to_string(v[k]) + " out of range");
      }
      used[v[k]] = 1;
    }
    const Triangle t = {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
    const double area = signed_area(t);
    const double scale = diameter(t);
    if (!(std::abs(area) > 1e-14 * scale * scale)) {
      throw InputError("element " + std::to_string(e) + " is degenerate");
    }
    if (area < 0.0) {
      std::swap(v[1], v[2]);
    }
  }
  for (int i = 0; i < nv; ++i) {
    if (!used[i]) {
      throw InputError("vertex " + std::to_string(i) + " is not used by any element");
    }
  }

  // edge table, sorted by vertex pair
  std::vector<std::pair<EdgeKey, int>> half(3 * static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    for (int k = 0; k < 3; ++k) {
      half[3 * e + k] = {EdgeKey(elements_[e][k], elements_[e][(k + 1) % 3]), 3 * e + k};
    }
  }
  std::sort(half.begin(), half.end(),
            [](const auto &l, const auto &r) { return l.first < r.first || (l.first == r.first && l.second < r.second); });
  element_edges_.assign(ne, {-1, -1, -1});
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j].first == half[i].first) {
      ++j;
    }
    if (j - i > 2) {
      throw InputError("edge (" + std::to_string(half[i].first.v0) + "," +
                       std::to_string(half[i].first.v1) + ") is shared by more than two elements");
    }
    const int id = n_edges();
    edges_.push_back(half[i].first);
    std::array<int, 2> adj = {half[i].second / 3, -1};
    element_edges_[half[i].second / 3][half[i].second % 3] = id;
    if (j - i == 2) {
      adj[1] = half[i + 1].second / 3;
      element_edges_[half[i + 1].second / 3][half[i + 1].second % 3] = id;
    }
    edge_elements_.push_back(adj);
    i = j;
  }

  boundary_vertex_.assign(nv, 0);
  for (int i = 0; i < n_edges(); ++i) {
    if (boundary_edge(i)) {
      boundary_vertex_[edges_[i].v0] = 1;
      boundary_vertex_[edges_[i].v1] = 1;
    }
  }
  dof_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!boundary_vertex_[v]) {
      dof_[v] = static_cast<int>(interior_vertices_.size());
      interior_vertices_.push_back(v);
    }
  }
  refinement_edge_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    refinement_edge_[e] = longest_local_edge(vertices_, elements_[e]);
  }
  id_ = next_mesh_id.fetch_add(1);
}

Triangle Triangulation::triangle(int e) const
{
  const auto &v = elements_[e];
  return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
}

double Triangulation::edge_length(int i) const
{
  return norm(vertices_[edges_[i].v1] - vertices_[edges_[i].v0]);
}

int Triangulation::find_edge(const EdgeKey &key) const
{
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || !(*it == key)) {
    return -1;
  }
  return static_cast<int>(it - edges_.begin());
}

std::vector<int> Triangulation::interior_edges() const
{
  std::vector<int> out;
  for (int i = 0; i < n_edges(); ++i) {
    if (!boundary_edge(i)) {
      out.push_back(i);
    }
  }
  return out;
}

double Triangulation::min_angle() const
{
  double result = std::numbers::pi;
  for (int e = 0; e < n_elements(); ++e) {
    const Triangle t = triangle(e);
    for (int k = 0; k < 3; ++k) {
      const Point u = t[(k + 1) % 3] - t[k];
      const Point w = t[(k + 2) % 3] - t[k];
      result = std::min(result, std::atan2(std::abs(cross(u, w)), dot(u, w)));
    }
  }
  return result;
}

ElementSplit element_split(const Triangulation &mesh, int e)
{
  const int k = mesh.refinement_edge(e);
  ElementSplit s;
  s.corner = {k, (k + 1) % 3, (k + 2) % 3};
  s.mid_edge = {k, (k + 1) % 3, (k + 2) % 3};
  return s;
}

namespace
{

// Closes the marking so that every element with a marked edge also has its refinement
// edge marked.
std::vector<char> close_marking(const Triangulation &mesh, const std::vector<EdgeKey> &marked)
{
  std::vector<char> flag(mesh.n_edges(), 0);
  std::vector<int> work;
  for (const auto &key : marked) {
    const int id = mesh.find_edge(key);
    if (id < 0) {
      throw InputError("edge (" + std::to_string(key.v0) + "," + std::to_string(key.v1) +
                       ") is not an edge of the mesh");
    }
    if (mesh.boundary_edge(id)) {
      throw InputError("edge (" + std::to_string(key.v0) + "," + std::to_string(key.v1) +
                       ") is a boundary edge");
    }
    flag[id] = 1;
    for (int e : mesh.edge_elements(id)) {
      if (e >= 0) {
        work.push_back(e);
      }
    }
  }
  while (!work.empty()) {
    const int e = work.back();
    work.pop_back();
    const int ref = mesh.element_edges(e)[mesh.refinement_edge(e)];
    if (flag[ref]) {
      continue;
    }
    flag[ref] = 1;
    for (int n : mesh.edge_elements(ref)) {
      if (n >= 0 && n != e) {
        work.push_back(n);
      }
    }
  }
  return flag;
}

}  // namespace

Refinement refine(const Triangulation &mesh, const std::vector<EdgeKey> &marked)
{
  const std::vector<char> flag = close_marking(mesh, marked);
  std::vector<Point> x = mesh.vertices();
  std::vector<int> mid(mesh.n_edges(), -1);
  Refinement out;
  for (int i = 0; i < mesh.n_edges(); ++i) {
    if (flag[i]) {
      mid[i] = static_cast<int>(x.size());
      x.push_back(midpoint(mesh.vertex(mesh.edge(i).v0), mesh.vertex(mesh.edge(i).v1)));
      if (!mesh.boundary_edge(i)) {
        out.bisected.push_back(mesh.edge(i));
      }
    }
  }
  std::vector<std::array<int, 3>> elements;
  std::vector<int> roots;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto &v = mesh.element(e);
    const auto &ed = mesh.element_edges(e);
    const ElementSplit s = element_split(mesh, e);
    const int a = v[s.corner[0]], b = v[s.corner[1]], c = v[s.corner[2]];
    const int m = mid[ed[s.mid_edge[0]]];
    const int p = mid[ed[s.mid_edge[1]]];
    const int q = mid[ed[s.mid_edge[2]]];
    auto add = [&](int i, int j, int k) {
      elements.push_back({i, j, k});
      roots.push_back(mesh.root(e));
      out.parent.push_back(e);
    };
    if (m < 0) {
      add(v[0], v[1], v[2]);
    } else if (p < 0 && q < 0) {
      add(a, m, c);
      add(m, b, c);
    } else if (p < 0) {
      add(a, m, q);
      add(q, m, c);
      add(m, b, c);
    } else if (q < 0) {
      add(a, m, c);
      add(m, b, p);
      add(m, p, c);
    } else {
      add(a, m, q);
      add(q, m, c);
      add(m, b, p);
      add(m, p, c);
    }
  }
  out.mesh = Triangulation(std::move(x), std::move(elements), std::move(roots));
  return out;
}

std::vector<EdgeKey> virtual_refined_set(const Triangulation &mesh,
                                         const std::vector<EdgeKey> &marked)
{
  const std::vector<char> flag = close_marking(mesh, marked);
  std::vector<EdgeKey> out;
  for (int i = 0; i < mesh.n_edges(); ++i) {
    if (flag[i] && !mesh.boundary_edge(i)) {
      out.push_back(mesh.edge(i));
    }
  }
  return out;
}

DetailStructure detail_structure(const Triangulation &mesh)
{
  DetailStructure d;
  d.detail_of_edge.assign(mesh.n_edges(), -1);
  int next_vertex = mesh.n_vertices();
  for (int i = 0; i < mesh.n_edges(); ++i) {
    if (!mesh.boundary_edge(i)) {
      d.detail_of_edge[i] = static_cast<int>(d.edge.size());
      d.edge.push_back(i);
      d.midpoint.push_back(next_vertex);
    }
    // midpoints of all edges are appended in edge order by uniform_refine
    ++next_vertex;
  }
  for (int e = 0; e < mesh.n_elements(); ++e) {
    int count = 0;
    for (int i : mesh.element_edges(e)) {
      count += mesh.boundary_edge(i) ? 0 : 1;
    }
    d.overlap = std::max(d.overlap, count);
  }
  return d;
}

UniformRefinement uniform_refine(const Triangulation &mesh)
{
  // refine() would leave boundary edges alone unless the closure reaches them
  std::vector<Point> x = mesh.vertices();
  std::vector<int> mid(mesh.n_edges());
  for (int i = 0; i < mesh.n_edges(); ++i) {
    mid[i] = static_cast<int>(x.size());
    x.push_back(midpoint(mesh.vertex(mesh.edge(i).v0), mesh.vertex(mesh.edge(i).v1)));
  }
  std::vector<std::array<int, 3>> elements;
  std::vector<int> roots;
  elements.reserve(4 * static_cast<std::size_t>(mesh.n_elements()));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto &v = mesh.element(e);
    const auto &ed = mesh.element_edges(e);
    const ElementSplit s = element_split(mesh, e);
    const std::array<int, 6> node = {v[s.corner[0]],          v[s.corner[1]],
                                     v[s.corner[2]],          mid[ed[s.mid_edge[0]]],
                                     mid[ed[s.mid_edge[1]]], mid[ed[s.mid_edge[2]]]};
    for (const auto &c : ElementSplit::children) {
      elements.push_back({node[c[0]], node[c[1]], node[c[2]]});
      roots.push_back(mesh.root(e));
    }
  }
  return {Triangulation(std::move(x), std::move(elements), std::move(roots)),
          detail_structure(mesh)};
}

Triangulation read_mesh(std::istream &in)
{
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      lines.push_back(line);
    }
  }
  if (lines.empty()) {
    throw InputError("mesh file is empty");
  }
  int nv = 0, ne = 0;
  {
    std::istringstream head(lines[0]);
    if (!(head >> nv >> ne) || nv < 3 || ne < 1) {
      throw InputError("mesh header must read 'n_vertices n_elements'");
    }
  }
  if (static_cast<int>(lines.size()) != 1 + nv + ne) {
    throw InputError("mesh file has " + std::to_string(lines.size() - 1) + " records, expected " +
                     std::to_string(nv + ne));
  }
  std::vector<Point> x(nv);
  std::vector<int> flags(nv);
  for (int i = 0; i < nv; ++i) {
    std::istringstream s(lines[1 + i]);
    if (!(s >> x[i].x >> x[i].y >> flags[i])) {
      throw InputError("bad vertex record " + std::to_string(i) + ": '" + lines[1 + i] + "'");
    }
  }
  std::vector<std::array<int, 3>> el(ne);
  for (int e = 0; e < ne; ++e) {
    std::istringstream s(lines[1 + nv + e]);
    if (!(s >> el[e][0] >> el[e][1] >> el[e][2])) {
      throw InputError("bad element record " + std::to_string(e) + ": '" + lines[1 + nv + e] + "'");
    }
  }
  Triangulation mesh(std::move(x), std::move(el));
  for (int i = 0; i < nv; ++i) {
    if ((flags[i] != 0) != mesh.boundary_vertex(i)) {
      throw InputError("boundary flag of vertex " + std::to_string(i) +
                       " disagrees with the mesh topology");
    }
  }
  return mesh;
}

Triangulation read_mesh_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open mesh file " + path);
  }
  return read_mesh(in);
}

void write_mesh(std::ostream &out, const Triangulation &mesh)
{
  char buf[96];
  out << mesh.n_vertices() << ' ' << mesh.n_elements() << '\n';
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", mesh.vertex(i).x, mesh.vertex(i).y,
                  mesh.boundary_vertex(i) ? 1 : 0);
    out << buf;
  }
  for (const auto &v : mesh.elements()) {
    out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
}

namespace
{

// Grid of 0.5 squares; `keep(i, j)` selects cells by lower-left corner index. Diagonals run
// with slope +1 or -1.
Triangulation grid_mesh(int n, double lo, double h, bool slope_up, bool (*keep)(int, int))
{
  std::vector<Point> x;
  std::vector<int> id((n + 1) * (n + 1), -1);
  auto vid = [&](int i, int j) {
    int &v = id[j * (n + 1) + i];
    if (v < 0) {
      v = static_cast<int>(x.size());
      x.push_back({lo + i * h, lo + j * h});
    }
    return v;
  };
  std::vector<std::array<int, 3>> el;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!keep(i, j)) {
        continue;
      }
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if (slope_up) {
        el.push_back({v00, v10, v11});
        el.push_back({v00, v11, v01});
      } else {
        el.push_back({v00, v10, v01});
        el.push_back({v10, v11, v01});
      }
    }
  }
  return Triangulation(std::move(x), std::move(el));
}

}  // namespace

Triangulation square_mesh()
{
  return grid_mesh(4, -1.0, 0.5, false, [](int, int) { return true; });
}

Triangulation lshape_mesh()
{
  return grid_mesh(4, -1.0, 0.5, true, [](int i, int j) { return i >= 2 || j >= 2; });
}

Triangulation slit_mesh(double delta)
{
  if (!(delta > 0.0 && delta < 0.5)) {
    throw InputError("slit half-width must lie in (0, 0.5)");
  }
  const std::vector<Point> x = {
    {0.0, 0.0},   {1.0, 0.0},  {1.0, 1.0},   {0.0, 1.0},   {-1.0, 1.0},  {-1.0, delta},
    {-1.0, -delta}, {-1.0, -1.0}, {0.0, -1.0}, {1.0, -1.0}, {0.5, 0.5},   {-0.5, 0.5},
    {-0.5, -0.5}, {0.5, -0.5},
  };
  // each quadrant is a fan of four triangles around its centre
  const std::array<std::array<int, 5>, 4> quad = {{
    {10, 0, 1, 2, 3},
    {11, 0, 3, 4, 5},
    {12, 0, 6, 7, 8},
    {13, 0, 8, 9, 1},
  }};
  std::vector<std::array<int, 3>> el;
  for (const auto &q : quad) {
    for (int k = 1; k <= 4; ++k) {
      el.push_back({q[0], q[k], q[k % 4 + 1]});
    }
  }
  return Triangulation(x, std::move(el));
}

}  // namespace sgfem
