// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace sgfem
{

namespace
{

using Triplet = Eigen::Triplet<double>;

// Barycentric coordinates of the local nodes a, b, c, m, p, q.
constexpr std::array<std::array<double, 3>, 6> node_bary = {{
  {1.0, 0.0, 0.0},
  {0.0, 1.0, 0.0},
  {0.0, 0.0, 1.0},
  {0.5, 0.5, 0.0},
  {0.0, 0.5, 0.5},
  {0.5, 0.0, 0.5},
}};

double element_integral(const Triangle &t, const SpatialField &field)
{
  if (field.is_constant()) {
    return field.constant_value() * std::abs(signed_area(t));
  }
  if (field.vanishes_on(t)) {
    return 0.0;
  }
  double s = 0.0;
  integrate_triangle(t, field.resolution(), [&](Point x, double w, const std::array<double, 3> &) {
    s += w * field(x);
  });
  if (!std::isfinite(s)) {
    throw NumericError("field integral is not finite");
  }
  return s;
}

// Value slot of (row, col) in a compressed matrix, -1 if absent.
template <typename Matrix>
int slot(const Matrix &m, int outer, int inner)
{
  const auto *idx = m.innerIndexPtr();
  const auto begin = m.outerIndexPtr()[outer];
  const auto end = m.outerIndexPtr()[outer + 1];
  const auto *it = std::lower_bound(idx + begin, idx + end, inner);
  if (it == idx + end || *it != inner) {
    return -1;
  }
  return static_cast<int>(it - idx);
}

}  // namespace

SparseMatrix stiffness(const Triangulation &mesh, const SpatialField &field)
{
  const int n = mesh.n_interior_vertices();
  std::vector<Triplet> trip;
  trip.reserve(9 * static_cast<std::size_t>(mesh.n_elements()));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Triangle t = mesh.triangle(e);
    const double w = element_integral(t, field);
    const auto g = barycentric_gradients(t);
    const auto &v = mesh.element(e);
    for (int i = 0; i < 3; ++i) {
      const int di = mesh.dof(v[i]);
      if (di < 0) {
        continue;
      }
      for (int j = 0; j < 3; ++j) {
        const int dj = mesh.dof(v[j]);
        if (dj >= 0) {
          trip.emplace_back(di, dj, w * dot(g[i], g[j]));
        }
      }
    }
  }
  SparseMatrix k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

Vector load(const Triangulation &mesh, const FunctionalSpec &spec)
{
  Vector b = Vector::Zero(mesh.n_interior_vertices());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Triangle t = mesh.triangle(e);
    const auto &v = mesh.element(e);
    std::array<double, 3> local = {0.0, 0.0, 0.0};
    if (spec.scalar.is_constant()) {
      const double c = spec.scalar.constant_value() * std::abs(signed_area(t)) / 3.0;
      local = {c, c, c};
    } else if (!spec.scalar.vanishes_on(t)) {
      integrate_triangle(t, spec.scalar.resolution(),
                         [&](Point x, double w, const std::array<double, 3> &lam) {
                           const double f = w * spec.scalar(x);
                           for (int i = 0; i < 3; ++i) {
                             local[i] += f * lam[i];
                           }
                         });
    }
    const auto g = barycentric_gradients(t);
    for (const auto &part : spec.vector) {
      if (std::binary_search(part.roots.begin(), part.roots.end(), mesh.root(e))) {
        const double area = std::abs(signed_area(t));
        for (int i = 0; i < 3; ++i) {
          local[i] -= area * dot(part.value, g[i]);
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      const int d = mesh.dof(v[i]);
      if (d >= 0) {
        b[d] += local[i];
      }
    }
  }
  if (!b.allFinite()) {
    throw NumericError("load vector is not finite");
  }
  return b;
}

SparseMatrix uniform_prolongation(const Triangulation &coarse, const Triangulation &fine)
{
  const int nv = coarse.n_vertices();
  if (fine.n_vertices() != nv + coarse.n_edges()) {
    throw InputError("fine mesh is not the uniform refinement of the coarse mesh");
  }
  std::vector<Triplet> trip;
  for (int v = 0; v < nv; ++v) {
    if (coarse.dof(v) >= 0) {
      trip.emplace_back(fine.dof(v), coarse.dof(v), 1.0);
    }
  }
  for (int i = 0; i < coarse.n_edges(); ++i) {
    const int fd = fine.dof(nv + i);
    if (fd < 0) {
      continue;
    }
    for (int v : {coarse.edge(i).v0, coarse.edge(i).v1}) {
      if (coarse.dof(v) >= 0) {
        trip.emplace_back(fd, coarse.dof(v), 0.5);
      }
    }
  }
  SparseMatrix p(fine.n_interior_vertices(), coarse.n_interior_vertices());
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

TwoLevelDiscretization::TwoLevelDiscretization(std::shared_ptr<const Triangulation> mesh)
  : mesh_(std::move(mesh)), detail_(detail_structure(*mesh_))
{
  const Triangulation &t = *mesh_;
  const int ne = t.n_elements();
  elements_.resize(ne);
  std::vector<Triplet> coarse_trip, detail_trip;
  coarse_trip.reserve(9 * static_cast<std::size_t>(ne));
  detail_trip.reserve(9 * static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    ElementData &d = elements_[e];
    const auto &v = t.element(e);
    const auto &ed = t.element_edges(e);
    const ElementSplit s = element_split(t, e);
    for (int k = 0; k < 3; ++k) {
      const int vk = v[s.corner[k]];
      d.dof[k] = t.dof(vk);
      d.node[k] = t.vertex(vk);
      d.detail[k] = detail_.detail_of_edge[ed[s.mid_edge[k]]];
    }
    d.node[3] = midpoint(d.node[0], d.node[1]);
    d.node[4] = midpoint(d.node[1], d.node[2]);
    d.node[5] = midpoint(d.node[2], d.node[0]);
    d.grad = barycentric_gradients({d.node[0], d.node[1], d.node[2]});
    for (int k = 0; k < 4; ++k) {
      const Triangle c = child(d, k);
      d.child_area[k] = std::abs(signed_area(c));
      const auto g = barycentric_gradients(c);
      d.mid_grad[k] = {Point{}, Point{}, Point{}};
      for (int j = 0; j < 3; ++j) {
        const int n = ElementSplit::children[k][j];
        if (n >= 3) {
          d.mid_grad[k][n - 3] = g[j];
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (d.dof[i] >= 0 && d.dof[j] >= 0) {
          coarse_trip.emplace_back(d.dof[i], d.dof[j], 1.0);
        }
        if (d.detail[i] >= 0 && d.dof[j] >= 0) {
          detail_trip.emplace_back(d.detail[i], d.dof[j], 1.0);
        }
      }
    }
  }
  coarse_pattern_.resize(n_dofs(), n_dofs());
  coarse_pattern_.setFromTriplets(coarse_trip.begin(), coarse_trip.end());
  detail_pattern_.resize(n_details(), n_dofs());
  detail_pattern_.setFromTriplets(detail_trip.begin(), detail_trip.end());
  for (auto &d : elements_) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        // column-major: outer index is the column
        d.coarse_pos[3 * i + j] =
          (d.dof[i] >= 0 && d.dof[j] >= 0) ? slot(coarse_pattern_, d.dof[j], d.dof[i]) : -1;
        d.detail_pos[3 * i + j] =
          (d.detail[i] >= 0 && d.dof[j] >= 0) ? slot(detail_pattern_, d.detail[i], d.dof[j]) : -1;
      }
    }
  }
}

Triangle TwoLevelDiscretization::child(const ElementData &d, int k) const
{
  const auto &c = ElementSplit::children[k];
  return {d.node[c[0]], d.node[c[1]], d.node[c[2]]};
}

std::array<double, 4> TwoLevelDiscretization::child_integrals(const ElementData &d,
                                                              const SpatialField &field) const
{
  std::array<double, 4> w;
  if (field.is_constant()) {
    for (int k = 0; k < 4; ++k) {
      w[k] = field.constant_value() * d.child_area[k];
    }
    return w;
  }
  if (field.vanishes_on({d.node[0], d.node[1], d.node[2]})) {
    return {0.0, 0.0, 0.0, 0.0};
  }
  for (int k = 0; k < 4; ++k) {
    w[k] = element_integral(child(d, k), field);
  }
  return w;
}

FieldMatrices TwoLevelDiscretization::assemble(const SpatialField &field, bool with_details) const
{
  FieldMatrices out;
  out.coarse = coarse_pattern_;
  std::fill_n(out.coarse.valuePtr(), out.coarse.nonZeros(), 0.0);
  if (with_details) {
    out.detail = detail_pattern_;
    std::fill_n(out.detail.valuePtr(), out.detail.nonZeros(), 0.0);
    out.detail_diagonal = Vector::Zero(n_details());
  }
  double *kv = out.coarse.valuePtr();
  double *dv = with_details ? out.detail.valuePtr() : nullptr;
  for (const auto &d : elements_) {
    const auto w = child_integrals(d, field);
    if (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0 && w[3] == 0.0) {
      continue;
    }
    const double total = w[0] + w[1] + w[2] + w[3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int pos = d.coarse_pos[3 * i + j];
        if (pos >= 0) {
          kv[pos] += total * dot(d.grad[i], d.grad[j]);
        }
      }
    }
    if (!with_details) {
      continue;
    }
    for (int i = 0; i < 3; ++i) {
      if (d.detail[i] < 0) {
        continue;
      }
      double diag = 0.0;
      for (int k = 0; k < 4; ++k) {
        diag += w[k] * dot(d.mid_grad[k][i], d.mid_grad[k][i]);
      }
      out.detail_diagonal[d.detail[i]] += diag;
      for (int j = 0; j < 3; ++j) {
        const int pos = d.detail_pos[3 * i + j];
        if (pos < 0) {
          continue;
        }
        double s = 0.0;
        for (int k = 0; k < 4; ++k) {
          s += w[k] * dot(d.mid_grad[k][i], d.grad[j]);
        }
        dv[pos] += s;
      }
    }
  }
  return out;
}

LoadVectors TwoLevelDiscretization::assemble(const FunctionalSpec &spec, bool with_details) const
{
  const Triangulation &t = *mesh_;
  LoadVectors out;
  out.coarse = Vector::Zero(n_dofs());
  if (with_details) {
    out.detail = Vector::Zero(n_details());
  }
  const bool scalar_zero = spec.scalar_is_zero();
  for (int e = 0; e < t.n_elements(); ++e) {
    const ElementData &d = elements_[e];
    std::array<double, 3> coarse = {0.0, 0.0, 0.0};
    std::array<double, 3> fine = {0.0, 0.0, 0.0};
    if (!scalar_zero) {
      if (spec.scalar.is_constant()) {
        const double c = spec.scalar.constant_value();
        for (int k = 0; k < 4; ++k) {
          const auto &ch = ElementSplit::children[k];
          for (int j = 0; j < 3; ++j) {
            const double f = c * d.child_area[k] / 3.0;
            for (int i = 0; i < 3; ++i) {
              coarse[i] += f * node_bary[ch[j]][i];
            }
            if (ch[j] >= 3) {
              fine[ch[j] - 3] += f;
            }
          }
        }
      } else if (!spec.scalar.vanishes_on({d.node[0], d.node[1], d.node[2]})) {
        for (int k = 0; k < 4; ++k) {
          const auto &ch = ElementSplit::children[k];
          integrate_triangle(child(d, k), spec.scalar.resolution(),
                             [&](Point x, double w, const std::array<double, 3> &lam) {
                               const double f = w * spec.scalar(x);
                               for (int j = 0; j < 3; ++j) {
                                 const double fl = f * lam[j];
                                 for (int i = 0; i < 3; ++i) {
                                   coarse[i] += fl * node_bary[ch[j]][i];
                                 }
                                 if (ch[j] >= 3) {
                                   fine[ch[j] - 3] += fl;
                                 }
                               }
                             });
        }
      }
    }
    for (const auto &part : spec.vector) {
      if (!std::binary_search(part.roots.begin(), part.roots.end(), t.root(e))) {
        continue;
      }
      double area = 0.0;
      for (int k = 0; k < 4; ++k) {
        area += d.child_area[k];
        for (int i = 0; i < 3; ++i) {
          fine[i] -= d.child_area[k] * dot(part.value, d.mid_grad[k][i]);
        }
      }
      for (int i = 0; i < 3; ++i) {
        coarse[i] -= area * dot(part.value, d.grad[i]);
      }
    }
    for (int i = 0; i < 3; ++i) {
      if (d.dof[i] >= 0) {
        out.coarse[d.dof[i]] += coarse[i];
      }
      if (with_details && d.detail[i] >= 0) {
        out.detail[d.detail[i]] += fine[i];
      }
    }
  }
  if (!out.coarse.allFinite() || (with_details && !out.detail.allFinite())) {
    throw NumericError("load vector is not finite");
  }
  return out;
}

}  // namespace sgfem
