// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "oracles.hpp"

#include "core/error.hpp"
#include "core/estimator.hpp"
#include "core/problems.hpp"

using namespace sgfem;

namespace
{

MultiIndexSet set_of(std::initializer_list<std::vector<int>> l)
{
  std::vector<MultiIndex> v;
  for (const auto &d : l) {
    v.emplace_back(d);
  }
  return MultiIndexSet(v);
}

struct Instance
{
  ProblemSpec problem;
  std::shared_ptr<const TwoLevelDiscretization> disc;
  std::unique_ptr<FieldCache> fields;
  RecurrenceTable table;
  MultiIndexSet P;
  std::unique_ptr<GalerkinOperator> op;

  Instance(ProblemSpec p, const Triangulation &mesh, MultiIndexSet indices)
    : problem(std::move(p)), table(recurrence(problem.measure, 20)), P(std::move(indices))
  {
    disc = std::make_shared<TwoLevelDiscretization>(std::make_shared<const Triangulation>(mesh));
    fields = std::make_unique<FieldCache>(disc, problem.coefficient);
    op = std::make_unique<GalerkinOperator>(P, *fields, table);
  }

  LoadVectors loads(const FunctionalSpec &f) const
  {
    return disc->assemble(bind_regions(f, disc->mesh()));
  }

  BlockVector solve_for(const LoadVectors &lv) const
  {
    BlockVector b = zero_blocks(P.size(), disc->n_dofs());
    b[0] = lv.coarse;
    return solve(*op, b, fields->mean_solver(), 1e-13).u;
  }

  IndicatorBundle estimate(const FunctionalSpec &f, int m_bar = 1)
  {
    const LoadVectors lv = loads(f);
    return two_level_estimate(*fields, *op, solve_for(lv), lv, detail_index_set(P, m_bar), table);
  }
};

Triangulation locally_refined(const Triangulation &m, int steps, unsigned seed)
{
  std::mt19937 rng(seed);
  Triangulation t = m;
  for (int s = 0; s < steps; ++s) {
    std::vector<EdgeKey> marks;
    for (int i : t.interior_edges()) {
      if (rng() % 4 == 0) {
        marks.push_back(t.edge(i));
      }
    }
    t = refine(t, marks).mesh;
  }
  return t;
}

}  // namespace

TEST_CASE("zero load gives zero indicators")
{
  Instance in(make_problem("experiment2"), lshape_mesh(), set_of({{0}, {1}, {0, 1}}));
  const FunctionalSpec zero;
  REQUIRE(zero.scalar_is_zero());
  const IndicatorBundle b = in.estimate(zero);
  CHECK(b.global() == 0.0);
  for (double v : b.spatial) {
    CHECK(v == 0.0);
  }
  for (double v : b.parametric) {
    CHECK(v == 0.0);
  }
  CHECK(b.edges.size() == b.spatial.size());
  CHECK(b.detail_indices.size() == static_cast<int>(b.parametric.size()));
}

TEST_CASE("estimator against a direct solve on the enhanced space")
{
  struct Case
  {
    std::string name;
    Triangulation mesh;
    MultiIndexSet P;
    int m_bar;
  };
  const std::vector<Case> cases = {
    {"experiment2", lshape_mesh(), MultiIndexSet::initial(), 1},
    {"experiment2", lshape_mesh(), set_of({{0}, {1}, {0, 1}, {2}}), 2},
    {"experiment2", locally_refined(lshape_mesh(), 2, 4), set_of({{0}, {1}, {2}}), 1},
    {"experiment1", square_mesh(), MultiIndexSet::initial(), 1},
    {"experiment1", locally_refined(square_mesh(), 1, 9), set_of({{0}, {1}, {0, 1}}), 1},
    {"experiment3", slit_mesh(0.005), set_of({{0}, {1}, {2}}), 1},
  };
  for (const Case &c : cases) {
    Instance in(make_problem(c.name), c.mesh, c.P);
    const BlockVector u = in.solve_for(in.loads(in.problem.primal));
    const oracle::EnhancedCheck e =
      oracle::enhanced_check(in.problem, c.mesh, c.P, c.m_bar, u, in.table);
    CAPTURE(c.name);
    CAPTURE(e.dofs);
    CHECK(e.spatial_defect <= 1e-10);
    CHECK(e.parametric_defect <= 1e-10);
    CHECK(e.decomposition_defect <= 1e-10);
    CHECK(e.norm_split_defect <= 1e-10);
    CHECK(e.pythagoras_defect <= 1e-9);
    CHECK(e.lambda_over_k * e.mu_sq <= e.error_sq);
    const double ratio = std::sqrt(e.error_sq / e.mu_sq);
    CHECK(ratio >= 0.2);
    CHECK(ratio <= 5.0);
  }
}

TEST_CASE("indicators do not depend on vertex numbering")
{
  const Triangulation m = locally_refined(lshape_mesh(), 1, 2);
  std::vector<int> perm(m.n_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Point> pv(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) {
    pv[perm[v]] = m.vertex(v);
  }
  std::vector<std::array<int, 3>> pe;
  for (const auto &e : m.elements()) {
    pe.push_back({perm[e[1]], perm[e[2]], perm[e[0]]});
  }
  std::reverse(pe.begin(), pe.end());
  const Triangulation pm(pv, pe);

  const MultiIndexSet P = set_of({{0}, {1}, {0, 1}});
  Instance a(make_problem("experiment2"), m, P);
  Instance b(make_problem("experiment2"), pm, P);
  const IndicatorBundle ia = a.estimate(a.problem.primal);
  const IndicatorBundle ib = b.estimate(b.problem.primal);
  std::map<EdgeKey, double> mb;
  for (std::size_t i = 0; i < ib.edges.size(); ++i) {
    mb[ib.edges[i]] = ib.spatial[i];
  }
  REQUIRE(ia.edges.size() == ib.edges.size());
  for (std::size_t i = 0; i < ia.edges.size(); ++i) {
    const EdgeKey k(perm[ia.edges[i].v0], perm[ia.edges[i].v1]);
    REQUIRE(mb.count(k) == 1);
    CHECK(mb[k] == doctest::Approx(ia.spatial[i]).epsilon(1e-9));
  }
  CHECK(ia.parametric.size() == ib.parametric.size());
  for (std::size_t i = 0; i < ia.parametric.size(); ++i) {
    CHECK(ia.parametric[i] == doctest::Approx(ib.parametric[i]).epsilon(1e-9));
  }
}

TEST_CASE("first step of the first experiment")
{
  const ProblemSpec p = make_problem("experiment1");
  Instance in(p, p.initial_mesh, MultiIndexSet::initial());
  const double mu = in.estimate(p.primal).global();
  const double zeta = in.estimate(p.goal).global();
  CHECK(mu > 0.0);
  CHECK(zeta > 0.0);
  CHECK(mu * zeta > 1e-3);
  CHECK(mu * zeta < 1e-1);
}

TEST_CASE("parametric indicators vanish away from the index set")
{
  Instance in(make_problem("experiment2"), lshape_mesh(), MultiIndexSet::initial());
  const LoadVectors lv = in.loads(in.problem.primal);
  const BlockVector u = in.solve_for(lv);
  const MultiIndexSet far = set_of({{3}, {0, 0, 2}, {1, 1}});
  const std::vector<double> v = parametric_indicators(*in.fields, *in.op, u, far, in.table);
  CHECK(v[far.find(MultiIndex({3}))] == 0.0);
  CHECK(v[far.find(MultiIndex({0, 0, 2}))] == 0.0);
  CHECK(v[far.find(MultiIndex({1, 1}))] > 0.0);  // (1 1) - e2 = (1 0) lies in P
  const IndicatorBundle zero_u = two_level_estimate(*in.fields, *in.op, zero_blocks(2, in.disc->n_dofs()),
                                                    lv, detail_index_set(in.P, 1), in.table);
  CHECK(zero_u.parametric_sq == 0.0);
  CHECK(zero_u.spatial_sq > 0.0);
}

TEST_CASE("estimates scale linearly with the load")
{
  Instance in(make_problem("experiment2"), lshape_mesh(), set_of({{0}, {1}, {0, 1}}));
  const double mu = in.estimate(in.problem.primal).global();
  for (double s : {-3.0, 0.5, 7.0}) {
    CHECK(in.estimate(in.problem.primal.scaled(s)).global() == doctest::Approx(std::abs(s) * mu).epsilon(1e-9));
  }
}

TEST_CASE("indicator files")
{
  Instance in(make_problem("experiment2"), lshape_mesh(), MultiIndexSet::initial());
  const IndicatorBundle b = in.estimate(in.problem.primal);
  std::ostringstream s, q;
  write_spatial_csv(s, b);
  write_parametric_csv(q, b);
  std::istringstream sl(s.str()), ql(q.str());
  std::string line;
  std::getline(sl, line);
  CHECK(line == "edge_v0,edge_v1,indicator");
  int rows = 0;
  while (std::getline(sl, line)) {
    int v0 = -1, v1 = -1;
    double x = -1.0;
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    ls >> v0 >> c1 >> v1 >> c2 >> x;
    CHECK((c1 == ',' && c2 == ','));
    CHECK(v0 < v1);
    CHECK(x == doctest::Approx(b.spatial[rows]).epsilon(1e-8));
    ++rows;
  }
  CHECK(rows == static_cast<int>(b.spatial.size()));
  std::getline(ql, line);
  CHECK(line == "index,indicator");
  std::getline(ql, line);
  CHECK(line.substr(0, line.find(',')) == b.detail_indices[0].str(b.detail_indices.print_width()));
  CHECK(line.front() == '(');
}
