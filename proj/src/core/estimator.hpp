// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_ESTIMATOR_HPP
#define SGFEM_CORE_ESTIMATOR_HPP

#include <cmath>
#include <iosfwd>
#include <vector>

#include "core/chaos.hpp"
#include "core/mesh.hpp"
#include "core/solver.hpp"

namespace sgfem
{

struct IndicatorBundle
{
  std::vector<EdgeKey> edges;        // interior edges, in detail order
  std::vector<double> spatial;       // mu(E)
  MultiIndexSet detail_indices;      // Q
  std::vector<double> parametric;    // mu(nu), nu in Q
  double spatial_sq = 0.0;
  double parametric_sq = 0.0;

  double global() const { return std::sqrt(spatial_sq + parametric_sq); }
};

/// Per-edge residual quotients against the detail hats, for every nu in P.
std::vector<double> spatial_indicators(FieldCache &fields, const GalerkinOperator &op,
                                       const BlockVector &u, const LoadVectors &load);

/// B_0-norms of the decoupled error solves on X (x) P_nu for nu in Q.
std::vector<double> parametric_indicators(FieldCache &fields, const GalerkinOperator &op,
                                          const BlockVector &u, const MultiIndexSet &Q,
                                          const RecurrenceTable &table);

IndicatorBundle two_level_estimate(FieldCache &fields, const GalerkinOperator &op,
                                   const BlockVector &u, const LoadVectors &load,
                                   const MultiIndexSet &Q, const RecurrenceTable &table);

// "edge_v0,edge_v1,indicator" and "index,indicator"
void write_spatial_csv(std::ostream &out, const IndicatorBundle &b);
void write_parametric_csv(std::ostream &out, const IndicatorBundle &b);

}  // namespace sgfem

#endif  // SGFEM_CORE_ESTIMATOR_HPP
