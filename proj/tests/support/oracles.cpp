// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "core/estimator.hpp"

namespace sgfem::oracle
{

double parametric_entry(const MultiIndex &a, const MultiIndex &b, int m, const RecurrenceTable &t)
{
  const int len = std::max(a.length(), b.length());
  for (int k = 1; k <= len; ++k) {
    if (k != m && a[k] != b[k]) {
      return 0.0;
    }
  }
  if (m == 0) {
    return a == b ? 1.0 : 0.0;
  }
  const int i = a[m], j = b[m];
  if (j == i + 1) {
    return t.beta(i);
  }
  if (i == j + 1) {
    return t.beta(j);
  }
  return 0.0;
}

Dense kronecker_sum(const MultiIndexSet &P, const std::vector<Dense> &K, const RecurrenceTable &t)
{
  const int n = static_cast<int>(K[0].rows());
  Dense A = Dense::Zero(n * P.size(), n * P.size());
  for (int a = 0; a < P.size(); ++a) {
    for (int b = 0; b < P.size(); ++b) {
      for (std::size_t m = 0; m < K.size(); ++m) {
        const double g = parametric_entry(P[a], P[b], static_cast<int>(m), t);
        if (g != 0.0) {
          A.block(a * n, b * n, n, n) += g * K[m];
        }
      }
    }
  }
  return A;
}

DenseVector flatten(const BlockVector &x)
{
  int n = 0;
  for (const auto &b : x) {
    n += static_cast<int>(b.size());
  }
  DenseVector out(n);
  int k = 0;
  for (const auto &b : x) {
    out.segment(k, b.size()) = b;
    k += static_cast<int>(b.size());
  }
  return out;
}

EnhancedCheck enhanced_check(const ProblemSpec &problem, const Triangulation &mesh,
                             const MultiIndexSet &P, int m_bar, const BlockVector &u,
                             const RecurrenceTable &table)
{
  const UniformRefinement ur = uniform_refine(mesh);
  const Triangulation &fine = ur.fine;
  const Dense R = Dense(uniform_prolongation(mesh, fine));
  const int nf = fine.n_interior_vertices();
  const int nc = mesh.n_interior_vertices();
  const MultiIndexSet Q = detail_index_set(P, m_bar);

  std::vector<MultiIndex> all(P.begin(), P.end());
  all.insert(all.end(), Q.begin(), Q.end());
  const int np = P.size();
  const int ni = static_cast<int>(all.size());
  int max_m = 0;
  for (const auto &nu : all) {
    max_m = std::max(max_m, nu.length());
  }
  const CoefficientExpansion &coef = *problem.coefficient;
  std::vector<Dense> Kf;
  for (int m = 0; m <= max_m; ++m) {
    Kf.emplace_back(Dense(stiffness(fine, coef.field(m))));
  }
  const Vector ff = load(fine, bind_regions(problem.primal, fine));

  // basis of each block, expressed in fine nodal coordinates
  std::vector<int> offset(ni + 1, 0);
  for (int a = 0; a < ni; ++a) {
    offset[a + 1] = offset[a] + (a < np ? nf : nc);
  }
  const Dense I = Dense::Identity(nf, nf);
  auto E = [&](int a) -> const Dense & { return a < np ? I : R; };

  const int n = offset[ni];
  Dense A = Dense::Zero(n, n);
  Dense A0 = Dense::Zero(n, n);
  DenseVector F = DenseVector::Zero(n);
  DenseVector U = DenseVector::Zero(n);
  for (int a = 0; a < ni; ++a) {
    const int ra = offset[a + 1] - offset[a];
    for (int b = 0; b < ni; ++b) {
      const int rb = offset[b + 1] - offset[b];
      for (int m = 0; m <= max_m; ++m) {
        const double g = parametric_entry(all[a], all[b], m, table);
        if (g != 0.0) {
          A.block(offset[a], offset[b], ra, rb) += g * (E(a).transpose() * Kf[m] * E(b));
        }
      }
    }
    A0.block(offset[a], offset[a], ra, ra) = E(a).transpose() * Kf[0] * E(a);
    if (all[a].is_zero()) {
      F.segment(offset[a], ra) = E(a).transpose() * ff;
    }
    if (a < np) {
      U.segment(offset[a], ra) = R * u[a];
    }
  }

  EnhancedCheck out;
  out.dofs = n;
  const DenseVector uh = A.ldlt().solve(F);
  const DenseVector d = uh - U;
  out.error_sq = d.dot(A * d);
  const double buh = uh.dot(A * uh);
  out.pythagoras_defect = std::abs(buh - U.dot(A * U) - out.error_sq) / buh;

  // residual and the three B_0 solves
  const DenseVector r = F - A * U;
  const DenseVector e_hat = A0.ldlt().solve(r);
  const int np_rows = offset[np];
  const DenseVector e_xp = A0.topLeftCorner(np_rows, np_rows).ldlt().solve(r.head(np_rows));

  auto mesh_ptr = std::make_shared<const Triangulation>(mesh);
  auto disc = std::make_shared<TwoLevelDiscretization>(mesh_ptr);
  FieldCache fields(disc, problem.coefficient);
  const GalerkinOperator op(P, fields, table);
  const MeanSolver &k0 = fields.mean_solver();
  DenseVector combined = DenseVector::Zero(n);
  combined.head(np_rows) = e_xp;
  double split = e_xp.dot(A0.topLeftCorner(np_rows, np_rows) * e_xp);
  std::vector<double> e_norm(Q.size());
  for (int q = 0; q < Q.size(); ++q) {
    Vector rq = Vector::Zero(nc);
    for (int b = 0; b < np; ++b) {
      for (int m = 1; m <= max_m; ++m) {
        const double g = parametric_entry(Q[q], P[b], m, table);
        if (g != 0.0) {
          rq -= g * (fields(m).coarse * u[b]);
        }
      }
    }
    const Vector eq = k0.solve(rq);
    combined.segment(offset[np + q], nc) = eq;
    e_norm[q] = std::sqrt(std::max(0.0, eq.dot(fields(0).coarse * eq)));
    split += e_norm[q] * e_norm[q];
  }
  out.decomposition_defect = (e_hat - combined).cwiseAbs().maxCoeff() /
                             std::max(e_hat.cwiseAbs().maxCoeff(), 1e-300);
  const double hat_sq = e_hat.dot(A0 * e_hat);
  out.norm_split_defect = std::abs(hat_sq - split) / std::max(hat_sq, 1e-300);

  const LoadVectors lv = disc->assemble(bind_regions(problem.primal, *mesh_ptr));
  const IndicatorBundle est = two_level_estimate(fields, op, u, lv, Q, table);
  out.mu_sq = est.global() * est.global();
  out.lambda_over_k = coef.lambda() / disc->detail().overlap;

  const double mu = est.global();
  for (int q = 0; q < Q.size(); ++q) {
    out.parametric_defect =
      std::max(out.parametric_defect, std::abs(est.parametric[q] - e_norm[q]) / mu);
  }
  double scale = 0.0;
  std::vector<double> spatial(disc->n_details(), 0.0);
  for (int j = 0; j < disc->n_details(); ++j) {
    const int fd = fine.dof(disc->detail().midpoint[j]);
    double s = 0.0;
    for (int a = 0; a < np; ++a) {
      const double v = r[offset[a] + fd];
      s += v * v;
    }
    spatial[j] = std::sqrt(s / Kf[0](fd, fd));
    scale = std::max(scale, spatial[j]);
  }
  for (int j = 0; j < disc->n_details(); ++j) {
    out.spatial_defect =
      std::max(out.spatial_defect, std::abs(spatial[j] - est.spatial[j]) / std::max(scale, 1e-300));
  }
  return out;
}

}  // namespace sgfem::oracle
