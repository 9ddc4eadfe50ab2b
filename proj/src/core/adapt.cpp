// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace sgfem
{

namespace
{

// Descending value, ascending position.
std::vector<int> ranked(const std::vector<int> &positions, const std::vector<double> &values)
{
  std::vector<int> order = positions;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) {
      return values[a] > values[b];
    }
    return a < b;
  });
  return order;
}

}  // namespace

std::vector<int> doerfler(const std::vector<double> &values, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw InputError("marking parameter must lie in (0, 1]");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("indicators must be finite and nonnegative");
    }
  }
  std::vector<int> all(values.size());
  std::iota(all.begin(), all.end(), 0);
  const std::vector<int> order = ranked(all, values);
  std::vector<double> prefix(order.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    acc += values[order[k]] * values[order[k]];
    prefix[k] = acc;
  }
  // the total is the last prefix sum, so theta = 1 stops exactly at the last nonzero entry
  const double total = acc;
  std::vector<int> marked;
  if (total == 0.0) {
    return marked;
  }
  std::size_t count = 0;
  while (count < order.size() && prefix[count] < theta * total) {
    ++count;
  }
  count = std::min(count + 1, order.size());
  marked.assign(order.begin(), order.begin() + static_cast<long>(count));
  if (!(theta * total <= prefix[count - 1])) {
    throw NumericError("Doerfler criterion violated by the marked set");
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::vector<int> combine(const std::vector<int> &marked_u, const std::vector<int> &marked_z,
                         const std::vector<double> &values_u, const std::vector<double> &values_z)
{
  const bool primal_smaller = marked_u.size() <= marked_z.size();
  const std::vector<int> &small = primal_smaller ? marked_u : marked_z;
  const std::vector<int> &other = primal_smaller ? marked_z : marked_u;
  const std::vector<double> &other_values = primal_smaller ? values_z : values_u;
  std::vector<int> out = small;
  const std::vector<int> order = ranked(other, other_values);
  out.insert(out.end(), order.begin(), order.begin() + static_cast<long>(small.size()));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double reduction_estimate(double mu, double zeta, const std::vector<double> &values_u,
                          const std::vector<double> &values_z, const std::vector<int> &set)
{
  double su = 0.0, sz = 0.0;
  for (int k : set) {
    su += values_u[k] * values_u[k];
    sz += values_z[k] * values_z[k];
  }
  return std::sqrt(mu * mu * sz + zeta * zeta * su);
}

RunResult run(const ProblemSpec &problem, const MarkingParams &params, const RunOptions &options)
{
  params.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const RecurrenceTable table = recurrence(problem.measure, 32);

  RunResult result;
  RunState &state = result.final;
  state.mesh = std::make_shared<const Triangulation>(problem.initial_mesh);
  state.indices = MultiIndexSet::initial();

  std::shared_ptr<TwoLevelDiscretization> disc;
  std::unique_ptr<FieldCache> fields;
  LoadVectors f, g;
  FunctionalSpec primal = bind_regions(problem.primal, problem.initial_mesh);
  FunctionalSpec goal = bind_regions(problem.goal, problem.initial_mesh);

  for (int iter = 0;; ++iter) {
    if (!disc || disc->mesh().id() != state.mesh->id()) {
      disc = std::make_shared<TwoLevelDiscretization>(state.mesh);
      fields = std::make_unique<FieldCache>(disc, problem.coefficient);
      f = disc->assemble(primal);
      g = disc->assemble(goal);
    }
    const MultiIndexSet &P = state.indices;
    const int needed = P.max_parameter() + params.m_bar;
    if (needed > problem.coefficient->max_terms()) {
      throw LimitError("index set needs " + std::to_string(needed) +
                       " expansion terms but only " +
                       std::to_string(problem.coefficient->max_terms()) + " are available");
    }
    if (P.max_degree() + 2 > table.n_max()) {
      throw LimitError("polynomial degree exceeds the recurrence table");
    }

    IterationRecord rec;
    rec.iter = iter;
    try {
      const GalerkinOperator op(P, *fields, table);
      const MeanSolver &pre = fields->mean_solver();
      BlockVector bf = zero_blocks(P.size(), disc->n_dofs());
      BlockVector bg = bf;
      bf[0] = f.coarse;
      bg[0] = g.coarse;
      SolveResult su = solve(op, bf, pre, options.solver_tol, options.solver_max_iterations);
      SolveResult sz = solve(op, bg, pre, options.solver_tol, options.solver_max_iterations);
      const MultiIndexSet Q = detail_index_set(P, params.m_bar);
      state.primal = two_level_estimate(*fields, op, su.u, f, Q, table);
      state.dual = two_level_estimate(*fields, op, sz.u, g, Q, table);
      state.u = std::move(su.u);
      state.z = std::move(sz.u);
      rec.cg_primal = su.iterations;
      rec.cg_dual = sz.iterations;
    } catch (const SolverError &e) {
      throw SolverError("iteration " + std::to_string(iter) + ": " + e.what(), e.history());
    }

    rec.n_interior = disc->n_dofs();
    rec.card_P = P.size();
    rec.dofs = static_cast<long long>(rec.n_interior) * rec.card_P;
    rec.mu = state.primal.global();
    rec.zeta = state.dual.global();
    rec.product = rec.mu * rec.zeta;
    rec.n_elements = state.mesh->n_elements();
    rec.active_M = P.active_parameters();
    rec.goal_value = g.coarse.dot(state.u[0]);
    rec.decision = "none";

    std::shared_ptr<const Triangulation> next_mesh;
    const bool done = rec.product <= params.tol;
    const bool out_of_budget = iter >= params.max_iterations;
    if (!done && !out_of_budget) {
      const auto &eu = state.primal;
      const auto &ez = state.dual;
      const auto mark_x = combine(doerfler(eu.spatial, params.theta_x),
                                  doerfler(ez.spatial, params.theta_x), eu.spatial, ez.spatial);
      const auto mark_p =
        combine(doerfler(eu.parametric, params.theta_p), doerfler(ez.parametric, params.theta_p),
                eu.parametric, ez.parametric);
      std::vector<EdgeKey> marked_edges;
      for (int k : mark_x) {
        marked_edges.push_back(eu.edges[k]);
      }
      std::vector<int> bisected;
      for (const auto &key : virtual_refined_set(*state.mesh, marked_edges)) {
        bisected.push_back(disc->detail().detail_of_edge[state.mesh->find_edge(key)]);
      }
      rec.rho_x = reduction_estimate(rec.mu, rec.zeta, eu.spatial, ez.spatial, bisected);
      rec.rho_p = reduction_estimate(rec.mu, rec.zeta, eu.parametric, ez.parametric, mark_p);
      if (rec.rho_x == 0.0 && rec.rho_p == 0.0) {
        throw NumericError("iteration " + std::to_string(iter) +
                           ": both error reduction estimates vanish while mu*zeta > tol");
      }
      if (rec.rho_x >= rec.rho_p) {
        rec.decision = "spatial";
        next_mesh = std::make_shared<const Triangulation>(refine(*state.mesh, marked_edges).mesh);
      } else {
        rec.decision = "parametric";
        for (int k : mark_p) {
          rec.added.push_back(eu.detail_indices[k]);
        }
      }
    }
    rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.records.push_back(rec);
    if (options.on_iteration) {
      options.on_iteration(result.records.back(), state);
    }
    if (next_mesh) {
      state.mesh = std::move(next_mesh);
    }
    if (rec.decision == "parametric") {
      state.indices.insert(rec.added);
    }
    if (done) {
      result.status = "converged";
      break;
    }
    if (out_of_budget) {
      result.status = "max_iterations";
      break;
    }
  }
  return result;
}

}  // namespace sgfem
