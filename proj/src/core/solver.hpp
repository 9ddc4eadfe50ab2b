// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_SOLVER_HPP
#define SGFEM_CORE_SOLVER_HPP

#include <map>
#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>

#include "core/assembly.hpp"
#include "core/chaos.hpp"
#include "core/fields.hpp"

namespace sgfem
{

// One dense spatial vector per index of the index set.
using BlockVector = std::vector<Vector>;

BlockVector zero_blocks(int n_blocks, int block_size);
double dot(const BlockVector &x, const BlockVector &y);

// Factorised K_0, shared by the preconditioner and the parametric error solves.
class MeanSolver
{
public:
  explicit MeanSolver(const SparseMatrix &k0);
  Vector solve(const Vector &r) const;

private:
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

//
// Matrices of the expansion terms on one mesh, assembled on first use.
//
class FieldCache
{
public:
  FieldCache(std::shared_ptr<const TwoLevelDiscretization> disc,
             std::shared_ptr<const CoefficientExpansion> coefficient, bool with_details = true);

  const TwoLevelDiscretization &discretization() const { return *disc_; }
  const CoefficientExpansion &coefficient() const { return *coef_; }
  const FieldMatrices &operator()(int m);
  const MeanSolver &mean_solver();
  int assembled() const { return static_cast<int>(cache_.size()); }

private:
  std::shared_ptr<const TwoLevelDiscretization> disc_;
  std::shared_ptr<const CoefficientExpansion> coef_;
  bool with_details_;
  std::map<int, std::unique_ptr<FieldMatrices>> cache_;
  std::unique_ptr<MeanSolver> mean_;
};

// target block += coefficient * K_m * source block
struct Coupling
{
  int target;
  int source;
  int m;
  double coefficient;
};

/// Nonzero parametric couplings between index sets, for parameters 1..max_m.
std::vector<Coupling> couplings(const MultiIndexSet &targets, const MultiIndexSet &sources,
                                const RecurrenceTable &table, int max_m);

//
// Action of the stochastic Galerkin matrix sum_m G_m (x) K_m on block vectors.
//
class GalerkinOperator
{
public:
  GalerkinOperator(MultiIndexSet indices, FieldCache &fields, const RecurrenceTable &table);

  const MultiIndexSet &indices() const { return indices_; }
  int n_blocks() const { return indices_.size(); }
  int block_size() const { return static_cast<int>(k_[0]->rows()); }
  int max_parameter() const { return static_cast<int>(k_.size()) - 1; }
  const SparseMatrix &matrix(int m) const { return *k_[m]; }
  const std::vector<Coupling> &couplings() const { return couplings_; }

  BlockVector apply(const BlockVector &x) const;

private:
  MultiIndexSet indices_;
  std::vector<const SparseMatrix *> k_;
  std::vector<Coupling> couplings_;
};

struct SolveResult
{
  BlockVector u;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Preconditioned CG with the block-diagonal mean preconditioner.
SolveResult solve(const GalerkinOperator &op, const BlockVector &b, const MeanSolver &precond,
                  double tol_rel = 1e-10, int max_iterations = 1000);

/// sqrt(x^T A x)
double energy_norm(const GalerkinOperator &op, const BlockVector &x);
/// sqrt(sum_nu x_nu^T K_0 x_nu)
double mean_energy_norm(const GalerkinOperator &op, const BlockVector &x);

}  // namespace sgfem

#endif  // SGFEM_CORE_SOLVER_HPP
