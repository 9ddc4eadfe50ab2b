// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/solver.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace sgfem
{

BlockVector zero_blocks(int n_blocks, int block_size)
{
  return BlockVector(n_blocks, Vector::Zero(block_size));
}

double dot(const BlockVector &x, const BlockVector &y)
{
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i].dot(y[i]);
  }
  return s;
}

MeanSolver::MeanSolver(const SparseMatrix &k0)
{
  ldlt_.compute(k0);
  if (ldlt_.info() != Eigen::Success) {
    throw NumericError("factorisation of the mean stiffness matrix failed");
  }
  if ((ldlt_.vectorD().array() <= 0.0).any()) {
    throw NumericError("mean stiffness matrix is not positive definite");
  }
}

Vector MeanSolver::solve(const Vector &r) const
{
  return ldlt_.solve(r);
}

FieldCache::FieldCache(std::shared_ptr<const TwoLevelDiscretization> disc,
                       std::shared_ptr<const CoefficientExpansion> coefficient, bool with_details)
  : disc_(std::move(disc)), coef_(std::move(coefficient)), with_details_(with_details)
{
}

const FieldMatrices &FieldCache::operator()(int m)
{
  auto it = cache_.find(m);
  if (it == cache_.end()) {
    auto mats = std::make_unique<FieldMatrices>(disc_->assemble(coef_->field(m), with_details_));
    it = cache_.emplace(m, std::move(mats)).first;
  }
  return *it->second;
}

const MeanSolver &FieldCache::mean_solver()
{
  if (!mean_) {
    mean_ = std::make_unique<MeanSolver>((*this)(0).coarse);
  }
  return *mean_;
}

std::vector<Coupling> couplings(const MultiIndexSet &targets, const MultiIndexSet &sources,
                                const RecurrenceTable &table, int max_m)
{
  std::vector<Coupling> out;
  for (int t = 0; t < targets.size(); ++t) {
    const MultiIndex &nu = targets[t];
    for (int m = 1; m <= max_m; ++m) {
      for (int delta : {-1, +1}) {
        if (nu[m] + delta < 0) {
          continue;
        }
        const int s = sources.find(nu.shifted(m, delta));
        if (s < 0) {
          continue;
        }
        if (std::max(nu[m], nu[m] + delta) > table.n_max() + 1) {
          throw LimitError("polynomial degree exceeds the recurrence table");
        }
        out.push_back({t, s, m, coupling(table, nu[m], nu[m] + delta)});
      }
    }
  }
  return out;
}

GalerkinOperator::GalerkinOperator(MultiIndexSet indices, FieldCache &fields,
                                   const RecurrenceTable &table)
  : indices_(std::move(indices))
{
  if (!indices_.contains_zero()) {
    throw InputError("index set must contain the zero index");
  }
  const int max_m = indices_.max_parameter();
  for (int m = 0; m <= max_m; ++m) {
    k_.push_back(&fields(m).coarse);
  }
  couplings_ = sgfem::couplings(indices_, indices_, table, max_m);
}

BlockVector GalerkinOperator::apply(const BlockVector &x) const
{
  if (static_cast<int>(x.size()) != n_blocks()) {
    throw InputError("block vector has " + std::to_string(x.size()) + " blocks, expected " +
                     std::to_string(n_blocks()));
  }
  BlockVector y(x.size());
  for (int i = 0; i < n_blocks(); ++i) {
    if (x[i].size() != block_size()) {
      throw InputError("block size mismatch");
    }
    y[i] = (*k_[0]) * x[i];
  }
  // each K_m x_mu is shared by the (at most two) targets it feeds per parameter
  std::map<std::pair<int, int>, Vector> product;
  for (const auto &c : couplings_) {
    auto key = std::make_pair(c.m, c.source);
    auto it = product.find(key);
    if (it == product.end()) {
      it = product.emplace(key, (*k_[c.m]) * x[c.source]).first;
    }
    y[c.target] += c.coefficient * it->second;
  }
  return y;
}

SolveResult solve(const GalerkinOperator &op, const BlockVector &b, const MeanSolver &precond,
                  double tol_rel, int max_iterations)
{
  const int nb = op.n_blocks();
  SolveResult res;
  res.u = zero_blocks(nb, op.block_size());
  for (const auto &blk : b) {
    if (!blk.allFinite()) {
      throw NumericError("right-hand side is not finite");
    }
  }
  BlockVector r = b;
  BlockVector z(nb);
  for (int i = 0; i < nb; ++i) {
    z[i] = precond.solve(r[i]);
  }
  double rz = dot(r, z);
  const double rz0 = rz;
  if (rz0 <= 0.0) {
    res.history.push_back(0.0);
    return res;
  }
  BlockVector p = z;
  res.history.push_back(1.0);
  for (int it = 1; it <= max_iterations; ++it) {
    const BlockVector q = op.apply(p);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      throw SolverError("operator is not positive definite (p^T A p = " + std::to_string(pq) + ")",
                        res.history);
    }
    const double alpha = rz / pq;
    for (int i = 0; i < nb; ++i) {
      res.u[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = precond.solve(r[i]);
    }
    const double rz_new = dot(r, z);
    const double rel = std::sqrt(std::max(rz_new, 0.0) / rz0);
    res.history.push_back(rel);
    res.iterations = it;
    res.relative_residual = rel;
    if (rel <= tol_rel) {
      return res;
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < nb; ++i) {
      p[i] = z[i] + beta * p[i];
    }
  }
  std::ostringstream msg;
  msg << "CG did not reach relative residual " << tol_rel << " in " << max_iterations
      << " iterations (last " << res.relative_residual << ")";
  throw SolverError(msg.str(), res.history);
}

double energy_norm(const GalerkinOperator &op, const BlockVector &x)
{
  return std::sqrt(std::max(0.0, dot(x, op.apply(x))));
}

double mean_energy_norm(const GalerkinOperator &op, const BlockVector &x)
{
  double s = 0.0;
  for (const auto &blk : x) {
    s += blk.dot(op.matrix(0) * blk);
  }
  return std::sqrt(std::max(0.0, s));
}

}  // namespace sgfem
