// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace sgfem
{

double MeasureSpec::density(double y) const
{
  if (std::abs(y) > 1.0) {
    return 0.0;
  }
  if (kind == MeasureKind::uniform) {
    return 0.5;
  }
  // normaliser 2 Phi(1) - 1 = erf(1/sqrt 2)
  const double mass = std::erf(1.0 / std::numbers::sqrt2);
  return std::exp(-0.5 * y * y) / (std::sqrt(2.0 * std::numbers::pi) * mass);
}

std::string MeasureSpec::name() const
{
  return kind == MeasureKind::uniform ? "uniform" : "truncated_gaussian";
}

namespace
{

std::vector<double> stieltjes(const MeasureSpec &measure, int n_max, int panels)
{
  const GaussRule rule = composite_gauss_legendre(-1.0, 1.0, panels, 24);
  const std::size_t nq = rule.nodes.size();
  std::vector<double> w(nq), prev(nq, 0.0), cur(nq, 1.0), next(nq);
  double mass = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    w[q] = rule.weights[q] * measure.density(rule.nodes[q]);
    mass += w[q];
  }
  // absorb quadrature error in the total mass so that P_0 is normalised exactly
  for (auto &wq : w) {
    wq /= mass;
  }
  std::vector<double> beta(n_max + 1);
  double beta_prev = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    double alpha = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      alpha += w[q] * rule.nodes[q] * cur[q] * cur[q];
    }
    double sq = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      next[q] = (rule.nodes[q] - alpha) * cur[q] - (n > 0 ? beta_prev : 0.0) * prev[q];
      sq += w[q] * next[q] * next[q];
    }
    beta[n] = std::sqrt(sq);
    for (std::size_t q = 0; q < nq; ++q) {
      next[q] /= beta[n];
    }
    std::swap(prev, cur);
    std::swap(cur, next);
    beta_prev = beta[n];
  }
  return beta;
}

}  // namespace

RecurrenceTable recurrence(const MeasureSpec &measure, int n_max)
{
  if (n_max < 0) {
    throw InputError("recurrence length must be nonnegative");
  }
  std::vector<double> beta = stieltjes(measure, n_max, 1);
  double change = 0.0;
  for (int panels = 2; panels <= 256; panels *= 2) {
    std::vector<double> refined = stieltjes(measure, n_max, panels);
    change = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      change = std::max(change, std::abs(refined[n] - beta[n]));
    }
    beta = std::move(refined);
    if (change <= 1e-12) {
      return RecurrenceTable(std::move(beta));
    }
  }
  std::ostringstream msg;
  msg << "recurrence coefficients for the " << measure.name()
      << " measure did not stabilise; last change " << change;
  throw NumericError(msg.str());
}

double eval_poly(const RecurrenceTable &table, int n, double y)
{
  if (n < 0 || n > table.n_max()) {
    throw InputError("polynomial degree " + std::to_string(n) + " exceeds the recurrence table");
  }
  double prev = 0.0, cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = (y * cur - table.beta(k - 1) * prev) / table.beta(k);
    prev = cur;
    cur = next;
  }
  return cur;
}

double coupling(const RecurrenceTable &table, int i, int j)
{
  if (j == i + 1) {
    return table.beta(i);
  }
  if (j == i - 1) {
    return table.beta(i - 1);
  }
  return 0.0;
}

MultiIndex::MultiIndex(std::vector<int> degrees) : deg_(std::move(degrees))
{
  for (int d : deg_) {
    if (d < 0) {
      throw InputError("multi-index entries must be nonnegative");
    }
  }
  while (!deg_.empty() && deg_.back() == 0) {
    deg_.pop_back();
  }
}

MultiIndex MultiIndex::unit(int m)
{
  std::vector<int> d(m, 0);
  d[m - 1] = 1;
  return MultiIndex(std::move(d));
}

int MultiIndex::total_degree() const
{
  int s = 0;
  for (int d : deg_) {
    s += d;
  }
  return s;
}

MultiIndex MultiIndex::shifted(int m, int delta) const
{
  std::vector<int> d = deg_;
  if (static_cast<int>(d.size()) < m) {
    d.resize(m, 0);
  }
  d[m - 1] += delta;
  return MultiIndex(std::move(d));
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex &other) const
{
  if (auto c = total_degree() <=> other.total_degree(); c != 0) {
    return c;
  }
  const int n = std::max(length(), other.length());
  for (int m = 1; m <= n; ++m) {
    if (auto c = (*this)[m] <=> other[m]; c != 0) {
      return c;
    }
  }
  return std::strong_ordering::equal;
}

std::string MultiIndex::str(int width) const
{
  const int n = std::max({width, length(), 1});
  std::string s = "(";
  for (int m = 1; m <= n; ++m) {
    if (m > 1) {
      s += ' ';
    }
    s += std::to_string((*this)[m]);
  }
  return s + ")";
}

MultiIndex MultiIndex::parse(const std::string &text)
{
  const auto open = text.find('(');
  const auto close = text.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw InputError("malformed multi-index '" + text + "'");
  }
  std::istringstream in(text.substr(open + 1, close - open - 1));
  std::vector<int> d;
  int v = 0;
  while (in >> v) {
    d.push_back(v);
  }
  if (!in.eof()) {
    throw InputError("malformed multi-index '" + text + "'");
  }
  return MultiIndex(std::move(d));
}

MultiIndexSet::MultiIndexSet(std::vector<MultiIndex> indices) : items_(std::move(indices))
{
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

MultiIndexSet MultiIndexSet::initial()
{
  return MultiIndexSet({MultiIndex(), MultiIndex::unit(1)});
}

int MultiIndexSet::find(const MultiIndex &nu) const
{
  const auto it = std::lower_bound(items_.begin(), items_.end(), nu);
  if (it == items_.end() || !(*it == nu)) {
    return -1;
  }
  return static_cast<int>(it - items_.begin());
}

int MultiIndexSet::insert(const std::vector<MultiIndex> &more)
{
  const int before = size();
  items_.insert(items_.end(), more.begin(), more.end());
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  return size() - before;
}

int MultiIndexSet::max_parameter() const
{
  int m = 0;
  for (const auto &nu : items_) {
    m = std::max(m, nu.length());
  }
  return m;
}

int MultiIndexSet::active_parameters() const
{
  std::set<int> active;
  for (const auto &nu : items_) {
    for (int m = 1; m <= nu.length(); ++m) {
      if (nu[m] > 0) {
        active.insert(m);
      }
    }
  }
  return static_cast<int>(active.size());
}

int MultiIndexSet::max_degree() const
{
  int d = 0;
  for (const auto &nu : items_) {
    for (int v : nu.degrees()) {
      d = std::max(d, v);
    }
  }
  return d;
}

MultiIndexSet detail_index_set(const MultiIndexSet &P, int m_bar)
{
  if (m_bar < 1) {
    throw InputError("M_bar must be at least 1");
  }
  const int m_cap = P.max_parameter() + m_bar;
  std::vector<MultiIndex> out;
  for (const auto &nu : P) {
    for (int m = 1; m <= m_cap; ++m) {
      MultiIndex up = nu.shifted(m, +1);
      if (!P.contains(up)) {
        out.push_back(std::move(up));
      }
      if (nu[m] > 0) {
        MultiIndex down = nu.shifted(m, -1);
        if (!P.contains(down)) {
          out.push_back(std::move(down));
        }
      }
    }
  }
  return MultiIndexSet(std::move(out));
}

}  // namespace sgfem
