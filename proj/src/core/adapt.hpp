// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_ADAPT_HPP
#define SGFEM_CORE_ADAPT_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/estimator.hpp"
#include "core/problems.hpp"

namespace sgfem
{

// Marking works on positions into a list of keys sorted in ascending key order, so ties
// between equal indicators resolve to the smaller key.

/// Minimal set with sum of squares >= theta * total; positions in ascending order.
std::vector<int> doerfler(const std::vector<double> &values, double theta);

/// Union of the smaller set with as many top entries of the other set, ranked by the other
/// solution's indicators. Ties in size keep the primal set.
std::vector<int> combine(const std::vector<int> &marked_u, const std::vector<int> &marked_z,
                         const std::vector<double> &values_u, const std::vector<double> &values_z);

/// rho^2 = mu^2 sum_S zeta(k)^2 + zeta^2 sum_S mu(k)^2
double reduction_estimate(double mu, double zeta, const std::vector<double> &values_u,
                          const std::vector<double> &values_z, const std::vector<int> &set);

struct IterationRecord
{
  int iter = 0;
  long long dofs = 0;
  double mu = 0.0;
  double zeta = 0.0;
  double product = 0.0;
  int n_elements = 0;
  int n_interior = 0;
  int card_P = 0;
  int active_M = 0;
  std::string decision;  // spatial, parametric or none
  double goal_value = 0.0;
  double seconds = 0.0;
  double rho_x = 0.0;
  double rho_p = 0.0;
  int cg_primal = 0;
  int cg_dual = 0;
  std::vector<MultiIndex> added;  // indices added by a parametric step
};

struct RunState
{
  std::shared_ptr<const Triangulation> mesh;
  MultiIndexSet indices;
  BlockVector u;
  BlockVector z;
  IndicatorBundle primal;
  IndicatorBundle dual;
};

struct RunResult
{
  std::vector<IterationRecord> records;
  RunState final;
  std::string status;  // converged, max_iterations
};

struct RunOptions
{
  double solver_tol = 1e-10;
  int solver_max_iterations = 1000;
  // Called after each iteration's record is complete.
  std::function<void(const IterationRecord &, const RunState &)> on_iteration;
};

/// The adaptive loop: solve, estimate, stop, mark, refine or enrich.
RunResult run(const ProblemSpec &problem, const MarkingParams &params, const RunOptions &options = {});

}  // namespace sgfem

#endif  // SGFEM_CORE_ADAPT_HPP
