// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "core/error.hpp"

namespace sgfem
{

std::vector<double> spatial_indicators(FieldCache &fields, const GalerkinOperator &op,
                                       const BlockVector &u, const LoadVectors &load)
{
  const auto &disc = fields.discretization();
  const int nd = disc.n_details();
  const FieldMatrices &mean = fields(0);
  std::vector<double> sq(nd, 0.0);
  for (int i = 0; i < op.n_blocks(); ++i) {
    Vector res = -(mean.detail * u[i]);
    if (op.indices()[i].is_zero()) {
      res += load.detail;
    }
    for (const auto &c : op.couplings()) {
      if (c.target == i) {
        res -= c.coefficient * (fields(c.m).detail * u[c.source]);
      }
    }
    for (int e = 0; e < nd; ++e) {
      sq[e] += res[e] * res[e];
    }
  }
  std::vector<double> out(nd);
  for (int e = 0; e < nd; ++e) {
    const double d = mean.detail_diagonal[e];
    if (!(d > 0.0)) {
      throw NumericError("detail energy of edge " + std::to_string(e) + " is not positive");
    }
    out[e] = std::sqrt(sq[e] / d);
  }
  return out;
}

std::vector<double> parametric_indicators(FieldCache &fields, const GalerkinOperator &op,
                                          const BlockVector &u, const MultiIndexSet &Q,
                                          const RecurrenceTable &table)
{
  int max_m = 0;
  for (const auto &nu : Q) {
    max_m = std::max(max_m, nu.length());
  }
  const auto links = couplings(Q, op.indices(), table, max_m);
  std::vector<Vector> r(Q.size(), Vector::Zero(op.block_size()));
  std::vector<char> touched(Q.size(), 0);
  for (const auto &c : links) {
    r[c.target] -= c.coefficient * (fields(c.m).coarse * u[c.source]);
    touched[c.target] = 1;
  }
  const MeanSolver &k0 = fields.mean_solver();
  std::vector<double> out(Q.size(), 0.0);
  for (int q = 0; q < Q.size(); ++q) {
    if (!touched[q]) {
      continue;
    }
    const Vector e = k0.solve(r[q]);
    const double v = r[q].dot(e);
    if (!std::isfinite(v)) {
      throw NumericError("parametric error solve failed for index " + Q[q].str());
    }
    out[q] = std::sqrt(std::max(0.0, v));
  }
  return out;
}

IndicatorBundle two_level_estimate(FieldCache &fields, const GalerkinOperator &op,
                                   const BlockVector &u, const LoadVectors &load,
                                   const MultiIndexSet &Q, const RecurrenceTable &table)
{
  IndicatorBundle b;
  const auto &disc = fields.discretization();
  b.spatial = spatial_indicators(fields, op, u, load);
  for (int e : disc.detail().edge) {
    b.edges.push_back(disc.mesh().edge(e));
  }
  b.detail_indices = Q;
  b.parametric = parametric_indicators(fields, op, u, Q, table);
  for (double v : b.spatial) {
    b.spatial_sq += v * v;
  }
  for (double v : b.parametric) {
    b.parametric_sq += v * v;
  }
  return b;
}

void write_spatial_csv(std::ostream &out, const IndicatorBundle &b)
{
  char buf[64];
  out << "edge_v0,edge_v1,indicator\n";
  for (std::size_t i = 0; i < b.edges.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", b.spatial[i]);
    out << b.edges[i].v0 << ',' << b.edges[i].v1 << ',' << buf << '\n';
  }
}

void write_parametric_csv(std::ostream &out, const IndicatorBundle &b)
{
  char buf[64];
  const int width = b.detail_indices.print_width();
  out << "index,indicator\n";
  for (int i = 0; i < b.detail_indices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", b.parametric[i]);
    out << b.detail_indices[i].str(width) << ',' << buf << '\n';
  }
}

}  // namespace sgfem
