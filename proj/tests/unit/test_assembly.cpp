// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "core/assembly.hpp"
#include "core/error.hpp"
#include "core/problems.hpp"

using namespace sgfem;
using Dense = Eigen::MatrixXd;

namespace
{

// int_T f through the collapsed square (Duffy) with n x n Gauss points
template <class F>
double duffy(const Triangle &t, F f, int n)
{
  const GaussRule g = gauss_legendre(n);
  const double jac = 2.0 * std::abs(signed_area(t));
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = 0.5 * (g.nodes[i] + 1.0);
      const double v = 0.5 * (g.nodes[j] + 1.0) * (1.0 - u);
      const double w = 0.25 * g.weights[i] * g.weights[j] * (1.0 - u);
      const Point x = t[0] + u * (t[1] - t[0]) + v * (t[2] - t[0]);
      s += w * jac * f(x);
    }
  }
  return s;
}

// gradients of the hat functions from the inverse Jacobian
std::array<Point, 3> hat_gradients(const Triangle &t)
{
  Eigen::Matrix2d J;
  J << t[1].x - t[0].x, t[2].x - t[0].x, t[1].y - t[0].y, t[2].y - t[0].y;
  const Eigen::Matrix2d Jit = J.inverse().transpose();
  const Eigen::Vector2d g1 = Jit * Eigen::Vector2d(1, 0), g2 = Jit * Eigen::Vector2d(0, 1);
  return {Point{-g1.x() - g2.x(), -g1.y() - g2.y()}, Point{g1.x(), g1.y()}, Point{g2.x(), g2.y()}};
}

// element loop written out independently, with a subdivided Duffy rule per element
Dense oracle_stiffness(const Triangulation &m, const SpatialField &a, int n = 24)
{
  const int nd = m.n_interior_vertices();
  Dense K = Dense::Zero(nd, nd);
  for (int e = 0; e < m.n_elements(); ++e) {
    const Triangle t = m.triangle(e);
    const auto g = hat_gradients(t);
    // four children for extra accuracy on oscillatory fields
    const Point p = midpoint(t[1], t[2]), q = midpoint(t[2], t[0]), r = midpoint(t[0], t[1]);
    double ia = 0.0;
    for (const Triangle &c : {Triangle{t[0], r, q}, Triangle{r, t[1], p}, Triangle{q, p, t[2]},
                              Triangle{p, q, r}}) {
      ia += duffy(c, [&](Point x) { return a(x); }, n);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int di = m.dof(m.element(e)[i]), dj = m.dof(m.element(e)[j]);
        if (di >= 0 && dj >= 0) {
          K(di, dj) += ia * dot(g[i], g[j]);
        }
      }
    }
  }
  return K;
}

double max_abs(const Dense &A)
{
  return A.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("constant and affine coefficients match the hand assembler")
{
  for (const Triangulation &m : {square_mesh(), lshape_mesh(), slit_mesh(0.005)}) {
    const Dense K1 = Dense(stiffness(m, SpatialField::constant(1.0)));
    CHECK(max_abs(K1 - oracle_stiffness(m, SpatialField::constant(1.0), 2)) <= 1e-12 * max_abs(K1));
    CHECK(max_abs(K1 - K1.transpose()) == 0.0);
    const SpatialField affine =
      SpatialField::function([](Point x) { return 2.0 + 0.5 * x.x - 0.25 * x.y; }, 0.0, 2.75);
    const Dense Ka = Dense(stiffness(m, affine));
    CHECK(max_abs(Ka - oracle_stiffness(m, affine, 3)) <= 1e-12 * max_abs(Ka));
    CHECK(max_abs(Dense(stiffness(m, SpatialField::constant(0.0)))) == 0.0);
    // row sums of the Laplacian vanish away from the boundary
    const Eigen::LLT<Dense> llt(K1);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("oscillatory fields converge under element quadrature")
{
  const ProblemSpec p = make_problem("experiment2");
  Triangulation m = lshape_mesh();
  for (int mode : {1, 5, 20, 40}) {
    const SpatialField &f = p.coefficient->field(mode);
    const Dense K = Dense(stiffness(m, f));
    const Dense O = oracle_stiffness(m, f, 30);
    CAPTURE(mode);
    CHECK(max_abs(K - O) <= 1e-7 * f.sup_norm() * max_abs(Dense(stiffness(m, SpatialField::constant(1.0)))));
  }
  const ProblemSpec p1 = make_problem("experiment1");
  for (int mode : {1, 10, 60}) {
    const SpatialField &f = p1.coefficient->field(mode);
    const Dense K = Dense(stiffness(square_mesh(), f));
    const Dense O = oracle_stiffness(square_mesh(), f, 30);
    CAPTURE(mode);
    CHECK(max_abs(K - O) <= 1e-7 * f.sup_norm() * max_abs(Dense(stiffness(square_mesh(), SpatialField::constant(1.0)))));
  }
}

TEST_CASE("scalar and vector loads")
{
  const Triangulation m = square_mesh();
  FunctionalSpec one;
  one.scalar = SpatialField::constant(1.0);
  const Vector b = load(m, one);
  for (int v : m.interior_vertices()) {
    double patch = 0.0;
    for (int e = 0; e < m.n_elements(); ++e) {
      for (int k : m.element(e)) {
        patch += (k == v) * std::abs(signed_area(m.triangle(e)));
      }
    }
    CHECK(b[m.dof(v)] == doctest::Approx(patch / 3.0).epsilon(1e-14));
  }

  const ProblemSpec p = make_problem("experiment1");
  const Vector g = load(m, p.primal);
  Vector expect = Vector::Zero(m.n_interior_vertices());
  const Triangle region = p.primal.vector[0].region;
  for (int e : region_elements(m, region)) {
    const auto gr = hat_gradients(m.triangle(e));
    for (int k = 0; k < 3; ++k) {
      const int d = m.dof(m.element(e)[k]);
      if (d >= 0) {
        expect[d] -= std::abs(signed_area(m.triangle(e))) * gr[k].x;
      }
    }
  }
  CHECK((g - expect).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(expect.cwiseAbs().maxCoeff() > 0.1);

  // mollifier load integrates to one against the constant
  const ProblemSpec p3 = make_problem("experiment3");
  Triangulation fine = p3.initial_mesh;
  for (int k = 0; k < 3; ++k) {
    fine = uniform_refine(fine).fine;
  }
  const Vector q = load(fine, p3.goal);
  CHECK(q.minCoeff() >= 0.0);
  CHECK(q.sum() <= 1.0 + 1e-8);
  CHECK(q.sum() > 0.9);
}

TEST_CASE("two-level matrices are restrictions of the refined ones")
{
  const ProblemSpec p = make_problem("experiment2");
  const ProblemSpec p3 = make_problem("experiment3");
  for (const auto &[problem, field] :
       {std::pair{&p, 0}, std::pair{&p, 3}, std::pair{&p, 17}, std::pair{&p3, 2}}) {
    auto mesh = std::make_shared<const Triangulation>(uniform_refine(problem->initial_mesh).fine);
    const TwoLevelDiscretization disc(mesh);
    const UniformRefinement ur = uniform_refine(*mesh);
    const Dense R = Dense(uniform_prolongation(*mesh, ur.fine));
    const SpatialField &f = problem->coefficient->field(field);
    const Dense Kf = Dense(stiffness(ur.fine, f));
    const FieldMatrices fm = disc.assemble(f);
    const double scale = max_abs(Kf);
    CAPTURE(field);
    CHECK(max_abs(Dense(fm.coarse) - R.transpose() * Kf * R) <= 1e-12 * scale);
    const Dense KR = Kf * R;
    double worst = 0.0, worst_diag = 0.0;
    for (int j = 0; j < disc.n_details(); ++j) {
      const int fd = ur.fine.dof(disc.detail().midpoint[j]);
      REQUIRE(fd >= 0);
      for (int i = 0; i < disc.n_dofs(); ++i) {
        worst = std::max(worst, std::abs(fm.detail.coeff(j, i) - KR(fd, i)));
      }
      worst_diag = std::max(worst_diag, std::abs(fm.detail_diagonal[j] - Kf(fd, fd)));
      // a detail hat only touches the vertices of its two elements
      CHECK(fm.detail.row(j).nonZeros() <= 4);
    }
    CHECK(worst <= 1e-12 * scale);
    CHECK(worst_diag <= 1e-12 * scale);

    const LoadVectors lv = disc.assemble(bind_regions(problem->primal, *mesh));
    const Vector ff = load(ur.fine, bind_regions(problem->primal, ur.fine));
    CHECK((lv.coarse - R.transpose() * ff).cwiseAbs().maxCoeff() <= 1e-13);
    for (int j = 0; j < disc.n_details(); ++j) {
      CHECK(lv.detail[j] == doctest::Approx(ff[ur.fine.dof(disc.detail().midpoint[j])]).epsilon(1e-12));
    }
    const FieldMatrices nd = disc.assemble(f, false);
    CHECK(max_abs(Dense(nd.coarse) - Dense(fm.coarse)) == 0.0);
  }
}

TEST_CASE("mean stiffness is symmetric positive definite")
{
  for (const auto &name : problem_names()) {
    const ProblemSpec p = make_problem(name);
    auto mesh = std::make_shared<const Triangulation>(p.initial_mesh);
    const TwoLevelDiscretization disc(mesh);
    const Dense K0 = Dense(disc.assemble(p.coefficient->field(0)).coarse);
    CHECK(max_abs(K0 - K0.transpose()) <= 1e-15 * max_abs(K0));
    const Eigen::SelfAdjointEigenSolver<Dense> es(K0);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    for (double d : disc.detail().denominator) {
      CHECK(d > 0.0);
    }
  }
}

TEST_CASE("prolongation interpolates affine functions")
{
  const Triangulation m = lshape_mesh();
  const UniformRefinement ur = uniform_refine(m);
  const SparseMatrix R = uniform_prolongation(m, ur.fine);
  CHECK(R.rows() == ur.fine.n_interior_vertices());
  CHECK(R.cols() == m.n_interior_vertices());
  // a coarse hat is piecewise affine; its fine values are 1, 1/2 or 0
  for (int k = 0; k < R.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(R, k); it; ++it) {
      CHECK((it.value() == 1.0 || it.value() == 0.5));
    }
  }
  Vector ones = Vector::Ones(R.cols());
  const Vector fine = R * ones;
  CHECK(fine.maxCoeff() == 1.0);
}
