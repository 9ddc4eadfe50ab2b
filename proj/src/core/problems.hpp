// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_PROBLEMS_HPP
#define SGFEM_CORE_PROBLEMS_HPP

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/chaos.hpp"
#include "core/fields.hpp"
#include "core/mesh.hpp"

namespace sgfem
{

struct MarkingParams
{
  double theta_x = 0.5;
  double theta_p = 0.9;
  int m_bar = 1;
  double tol = 1e-4;
  int max_iterations = 200;

  void validate() const;
};

struct ProblemSpec
{
  std::string name;
  std::string domain;  // square, lshape, slit_delta
  Triangulation initial_mesh;
  std::shared_ptr<const CoefficientExpansion> coefficient;
  MeasureSpec measure;
  FunctionalSpec primal;
  FunctionalSpec goal;
  MarkingParams defaults;
};

/// Riemann zeta function for s > 1.
double riemann_zeta(double s);

// Eigenpair of the exponential kernel exp(-|x - x'| / l) on [-1, 1].
struct KLMode
{
  double omega = 0.0;
  double eigenvalue = 0.0;
  bool even = true;
  double scale = 1.0;  // normaliser: phi = scale * cos(omega x) or scale * sin(omega x)

  double operator()(double x) const;
  double sup_norm() const;
};

/// First `count` eigenpairs in decreasing eigenvalue order.
std::vector<KLMode> kl_modes(double corr_length, int count);

/// KL expansion of a separable exponential covariance field on (-1, 1)^2.
CoefficientExpansion kl_expansion(double sigma, double l1, double l2, double mean, int max_terms,
                                  double c);

/// Planar Fourier modes with algebraic decay; a_0 = 1.
CoefficientExpansion eigel_expansion(double amplitude, double decay, int max_terms);

/// (c / alpha_min)(sum y_m a_m + alpha_min) + eps with alpha_min = A zeta(decay).
CoefficientExpansion emn_expansion(double c, double eps, double decay, double amplitude,
                                   int max_terms);

// (beta_1(m), beta_2(m)) of the Fourier mode ordering.
std::pair<int, int> fourier_frequencies(int m);

/// Normalising constant C of the mollifier with radius r.
double mollifier_constant(double r);
SpatialField mollifier(Point x0, double r);

/// Builds a named problem with overrides. Unknown option keys are rejected.
ProblemSpec make_problem(const std::string &name, const nlohmann::json &options = nlohmann::json::object());
std::vector<std::string> problem_names();

}  // namespace sgfem

#endif  // SGFEM_CORE_PROBLEMS_HPP
