// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/problems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace sgfem
{

using nlohmann::json;

void MarkingParams::validate() const
{
  if (!(theta_x > 0.0 && theta_x <= 1.0)) {
    throw ConfigError("theta_x must lie in (0, 1]");
  }
  if (!(theta_p > 0.0 && theta_p <= 1.0)) {
    throw ConfigError("theta_p must lie in (0, 1]");
  }
  if (m_bar < 1) {
    throw ConfigError("m_bar must be at least 1");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw ConfigError("tol must be positive");
  }
  if (max_iterations < 0) {
    throw ConfigError("max_iterations must be nonnegative");
  }
}

double riemann_zeta(double s)
{
  if (!(s > 1.0)) {
    throw InputError("zeta is only used for s > 1");
  }
  return std::riemann_zeta(s);
}

double KLMode::operator()(double x) const
{
  return scale * (even ? std::cos(omega * x) : std::sin(omega * x));
}

double KLMode::sup_norm() const
{
  // odd roots exceed pi/2, so sin reaches 1 inside [-1, 1]
  return scale;
}

namespace
{

double bisect(const std::function<double(double)> &f, double lo, double hi, int mode)
{
  double flo = f(lo);
  if (flo * f(hi) > 0.0) {
    throw NumericError("no sign change while bracketing KL root " + std::to_string(mode));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<KLMode> kl_modes(double corr_length, int count)
{
  if (!(corr_length > 0.0)) {
    throw InputError("correlation length must be positive");
  }
  const double l = corr_length;
  const double pi = std::numbers::pi;
  const double gap = 1e-14;
  std::vector<KLMode> out;
  // roots alternate: even in (k pi, k pi + pi/2), odd in (k pi - pi/2, k pi)
  for (int k = 0; static_cast<int>(out.size()) < count; ++k) {
    KLMode even;
    even.even = true;
    even.omega = bisect([l](double w) { return w * std::sin(w) - std::cos(w) / l; },
                        k * pi + gap, k * pi + 0.5 * pi - gap, static_cast<int>(out.size()));
    even.eigenvalue = 2.0 * l / (1.0 + l * l * even.omega * even.omega);
    even.scale = 1.0 / std::sqrt(1.0 + std::sin(2.0 * even.omega) / (2.0 * even.omega));
    out.push_back(even);
    if (static_cast<int>(out.size()) == count) {
      break;
    }
    KLMode odd;
    odd.even = false;
    odd.omega = bisect([l](double w) { return std::sin(w) + l * w * std::cos(w); },
                       (k + 0.5) * pi + gap, (k + 1) * pi - gap, static_cast<int>(out.size()));
    odd.eigenvalue = 2.0 * l / (1.0 + l * l * odd.omega * odd.omega);
    odd.scale = 1.0 / std::sqrt(1.0 - std::sin(2.0 * odd.omega) / (2.0 * odd.omega));
    out.push_back(odd);
  }
  return out;
}

CoefficientExpansion kl_expansion(double sigma, double l1, double l2, double mean, int max_terms,
                                  double c)
{
  if (!(sigma > 0.0) || !(mean > 0.0) || max_terms < 1) {
    throw InputError("KL expansion needs sigma > 0, mean > 0 and at least one term");
  }
  const auto m1 = kl_modes(l1, max_terms);
  const auto m2 = kl_modes(l2, max_terms);
  struct Pair
  {
    double value;
    int i, j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < max_terms; ++i) {
    for (int j = 0; j < max_terms; ++j) {
      pairs.push_back({m1[i].eigenvalue * m2[j].eigenvalue, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair &a, const Pair &b) {
    if (a.value != b.value) {
      return a.value > b.value;
    }
    return a.i < b.i;
  });
  std::vector<SpatialField> terms;
  for (int m = 0; m < max_terms; ++m) {
    const KLMode p = m1[pairs[m].i];
    const KLMode q = m2[pairs[m].j];
    const double amp = c * sigma * std::sqrt(pairs[m].value);
    const double wavelength = 2.0 * std::numbers::pi / std::max(p.omega, q.omega);
    terms.push_back(SpatialField::function([p, q, amp](Point x) { return amp * p(x.x) * q(x.y); },
                                           wavelength / 6.0, amp * p.sup_norm() * q.sup_norm()));
  }
  return CoefficientExpansion(SpatialField::constant(mean), std::move(terms), mean, mean);
}

std::pair<int, int> fourier_frequencies(int m)
{
  int k = static_cast<int>(std::floor(-0.5 + std::sqrt(0.25 + 2.0 * m)));
  while ((k + 1) * (k + 2) / 2 <= m) {
    ++k;
  }
  while (k * (k + 1) / 2 > m) {
    --k;
  }
  const int b1 = m - k * (k + 1) / 2;
  return {b1, k - b1};
}

namespace
{

std::vector<SpatialField> fourier_terms(double amplitude, double decay, int max_terms, double scale)
{
  std::vector<SpatialField> terms;
  for (int m = 1; m <= max_terms; ++m) {
    const auto [b1, b2] = fourier_frequencies(m);
    const double alpha = scale * amplitude * std::pow(static_cast<double>(m), -decay);
    const double w1 = 2.0 * std::numbers::pi * b1;
    const double w2 = 2.0 * std::numbers::pi * b2;
    const double wavelength = 1.0 / std::max(b1, b2);
    terms.push_back(SpatialField::function(
      [alpha, w1, w2](Point x) { return alpha * std::cos(w1 * x.x) * std::cos(w2 * x.y); },
      wavelength / 6.0, std::abs(alpha)));
  }
  return terms;
}

}  // namespace

CoefficientExpansion eigel_expansion(double amplitude, double decay, int max_terms)
{
  if (!(decay > 1.0)) {
    throw InputError("decay rate must exceed 1");
  }
  if (!(amplitude > 0.0 && amplitude * riemann_zeta(decay) < 1.0)) {
    throw InputError("amplitude must lie in (0, 1/zeta(decay))");
  }
  return CoefficientExpansion(SpatialField::constant(1.0),
                              fourier_terms(amplitude, decay, max_terms, 1.0), 1.0, 1.0);
}

CoefficientExpansion emn_expansion(double c, double eps, double decay, double amplitude,
                                   int max_terms)
{
  if (!(c > 0.0 && eps > 0.0)) {
    throw InputError("c and epsilon must be positive");
  }
  if (!(decay > 1.0)) {
    throw InputError("decay rate must exceed 1");
  }
  if (!(amplitude > 0.0 && amplitude * riemann_zeta(decay) < 1.0)) {
    throw InputError("amplitude must lie in (0, 1/zeta(decay))");
  }
  const double alpha_min = amplitude * riemann_zeta(decay);
  return CoefficientExpansion(SpatialField::constant(c + eps),
                              fourier_terms(amplitude, decay, max_terms, c / alpha_min), c + eps,
                              c + eps);
}

double mollifier_constant(double r)
{
  if (!(r > 0.0)) {
    throw InputError("mollifier radius must be positive");
  }
  // int_0^1 exp(-1 / (1 - s^2)) s ds, all derivatives vanish at s = 1
  const GaussRule rule = composite_gauss_legendre(0.0, 1.0, 64, 20);
  double radial = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double s = rule.nodes[q];
    radial += rule.weights[q] * s * std::exp(-1.0 / (1.0 - s * s));
  }
  return 1.0 / (2.0 * std::numbers::pi * radial * r * r);
}

SpatialField mollifier(Point x0, double r)
{
  const double c = mollifier_constant(r);
  const double r2 = r * r;
  SpatialField f = SpatialField::function(
    [x0, r2, c](Point x) {
      const Point d = x - x0;
      const double rho2 = dot(d, d);
      return rho2 < r2 ? c * std::exp(-r2 / (r2 - rho2)) : 0.0;
    },
    r / 10.0, c * std::exp(-1.0));
  f.with_support(x0, r);
  return f;
}

namespace
{

class Options
{
public:
  Options(const json &j, std::set<std::string> allowed) : j_(j)
  {
    if (!j_.is_object()) {
      throw ConfigError("problem options must be a JSON object");
    }
    for (const auto &[key, value] : j_.items()) {
      if (!allowed.count(key)) {
        throw ConfigError("unknown problem option '" + key + "'");
      }
    }
  }

  double number(const std::string &key, double fallback) const
  {
    if (!j_.contains(key)) {
      return fallback;
    }
    if (!j_[key].is_number()) {
      throw ConfigError("problem option '" + key + "' must be a number");
    }
    return j_[key].get<double>();
  }

  int integer(const std::string &key, int fallback) const
  {
    if (!j_.contains(key)) {
      return fallback;
    }
    if (!j_[key].is_number_integer()) {
      throw ConfigError("problem option '" + key + "' must be an integer");
    }
    return j_[key].get<int>();
  }

  Point point(const std::string &key, Point fallback) const
  {
    if (!j_.contains(key)) {
      return fallback;
    }
    const json &v = j_[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError("problem option '" + key + "' must be a pair of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  bool has(const std::string &key) const { return j_.contains(key); }
  std::string text(const std::string &key) const
  {
    if (!j_[key].is_string()) {
      throw ConfigError("problem option '" + key + "' must be a string");
    }
    return j_[key].get<std::string>();
  }

private:
  const json &j_;
};

Triangulation initial_mesh(const Options &opt, Triangulation fallback)
{
  if (opt.has("mesh_file")) {
    return read_mesh_file(opt.text("mesh_file"));
  }
  return fallback;
}

FunctionalSpec characteristic_dx(const Triangulation &mesh, const Triangle &region)
{
  FunctionalSpec spec;
  spec.vector.push_back({region, region_elements(mesh, region), Point{1.0, 0.0}});
  return spec;
}

void check_support_inside(const Triangulation &mesh, Point x0, double r)
{
  bool inside = false;
  for (int e = 0; e < mesh.n_elements() && !inside; ++e) {
    const Triangle t = mesh.triangle(e);
    bool in = true;
    for (int k = 0; k < 3; ++k) {
      if (cross(t[(k + 1) % 3] - t[k], x0 - t[k]) < 0.0) {
        in = false;
      }
    }
    inside = in;
  }
  if (!inside) {
    throw InputError("mollifier centre lies outside the domain");
  }
  for (int i = 0; i < mesh.n_edges(); ++i) {
    if (!mesh.boundary_edge(i)) {
      continue;
    }
    const Point p = mesh.vertex(mesh.edge(i).v0);
    const Point d = mesh.vertex(mesh.edge(i).v1) - p;
    const double s = std::clamp(dot(x0 - p, d) / dot(d, d), 0.0, 1.0);
    if (norm(x0 - (p + s * d)) <= r) {
      throw InputError("mollifier support touches the domain boundary");
    }
  }
}

ProblemSpec experiment1(const json &options)
{
  const Options opt(options, {"sigma", "correlation_length", "mean", "max_terms", "mesh_file"});
  ProblemSpec p;
  p.name = "experiment1";
  p.domain = "square";
  p.initial_mesh = initial_mesh(opt, square_mesh());
  p.measure.kind = MeasureKind::truncated_gaussian;
  const double c = 1.0 / recurrence(p.measure, 0).beta(0);
  const double sigma = opt.number("sigma", 0.15);
  const double l = opt.number("correlation_length", 2.0);
  const double mean = opt.number("mean", 2.0);
  const int terms = opt.integer("max_terms", 60);
  p.coefficient =
    std::make_shared<CoefficientExpansion>(kl_expansion(sigma, l, l, mean, terms, c));
  p.primal = characteristic_dx(p.initial_mesh, {Point{-1.0, -1.0}, Point{0.0, -1.0}, Point{-1.0, 0.0}});
  p.goal = characteristic_dx(p.initial_mesh, {Point{1.0, 1.0}, Point{0.0, 1.0}, Point{1.0, 0.0}});
  p.defaults = {0.5, 0.9, 1, 1e-4, 200};
  return p;
}

ProblemSpec experiment2(const json &options)
{
  const Options opt(options, {"decay", "tau", "amplitude", "max_terms", "mesh_file"});
  ProblemSpec p;
  p.name = "experiment2";
  p.domain = "lshape";
  p.initial_mesh = initial_mesh(opt, lshape_mesh());
  p.measure.kind = MeasureKind::uniform;
  const double decay = opt.number("decay", 2.0);
  if (opt.has("tau") && opt.has("amplitude")) {
    throw ConfigError("give either tau or amplitude, not both");
  }
  const double amplitude =
    opt.has("amplitude") ? opt.number("amplitude", 0.0) : opt.number("tau", 0.9) / riemann_zeta(decay);
  p.coefficient = std::make_shared<CoefficientExpansion>(
    eigel_expansion(amplitude, decay, opt.integer("max_terms", 100)));
  p.primal.scalar = SpatialField::constant(1.0);
  p.goal = characteristic_dx(p.initial_mesh, {Point{0.5, -1.0}, Point{1.0, -1.0}, Point{1.0, -0.5}});
  p.defaults = {0.3, 0.8, 1, 1e-4, 200};
  return p;
}

ProblemSpec experiment3(const json &options)
{
  const Options opt(options, {"c", "epsilon", "decay", "amplitude", "x0", "radius", "delta",
                              "max_terms", "mesh_file"});
  ProblemSpec p;
  p.name = "experiment3";
  p.domain = "slit_delta";
  p.initial_mesh = initial_mesh(opt, slit_mesh(opt.number("delta", 0.005)));
  p.measure.kind = MeasureKind::uniform;
  p.coefficient = std::make_shared<CoefficientExpansion>(
    emn_expansion(opt.number("c", 0.1), opt.number("epsilon", 0.005), opt.number("decay", 2.0),
                  opt.number("amplitude", 0.6), opt.integer("max_terms", 100)));
  p.primal.scalar = SpatialField::constant(1.0);
  const Point x0 = opt.point("x0", {0.4, -0.5});
  const double r = opt.number("radius", 0.15);
  check_support_inside(p.initial_mesh, x0, r);
  p.goal.scalar = mollifier(x0, r);
  p.defaults = {0.3, 0.8, 1, 1e-3, 200};
  return p;
}

}  // namespace

ProblemSpec make_problem(const std::string &name, const json &options)
{
  if (name == "experiment1") {
    return experiment1(options);
  }
  if (name == "experiment2") {
    return experiment2(options);
  }
  if (name == "experiment3") {
    return experiment3(options);
  }
  throw ConfigError("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names()
{
  return {"experiment1", "experiment2", "experiment3"};
}

}  // namespace sgfem
