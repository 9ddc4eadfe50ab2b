// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_CHAOS_HPP
#define SGFEM_CORE_CHAOS_HPP

#include <compare>
#include <string>
#include <vector>

namespace sgfem
{

enum class MeasureKind
{
  uniform,
  truncated_gaussian,
};

// Symmetric probability measure on [-1, 1].
struct MeasureSpec
{
  MeasureKind kind = MeasureKind::uniform;

  double density(double y) const;
  std::string name() const;
};

// beta_0 .. beta_{n_max} of the orthonormal three-term recurrence
//   beta_n P_{n+1} = y P_n - beta_{n-1} P_{n-1},  P_0 = 1, P_{-1} = 0.
class RecurrenceTable
{
public:
  RecurrenceTable() = default;
  explicit RecurrenceTable(std::vector<double> beta) : beta_(std::move(beta)) {}

  int n_max() const { return static_cast<int>(beta_.size()) - 1; }
  double beta(int n) const { return n < 0 ? 1.0 : beta_.at(n); }
  const std::vector<double> &betas() const { return beta_; }

private:
  std::vector<double> beta_;
};

/// Stieltjes procedure on composite Gauss-Legendre quadrature, refined until stable.
RecurrenceTable recurrence(const MeasureSpec &measure, int n_max);

/// P_n(y) by forward recurrence.
double eval_poly(const RecurrenceTable &table, int n, double y);

/// Integral of y P_i P_j against the measure.
double coupling(const RecurrenceTable &table, int i, int j);

//
// Finitely supported multi-index. Stored densely without trailing zeros; entry m-1 holds
// the degree in parameter y_m.
//
class MultiIndex
{
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> degrees);

  static MultiIndex unit(int m);

  // Degree in parameter m (1-based).
  int operator[](int m) const { return m >= 1 && m <= length() ? deg_[m - 1] : 0; }
  int length() const { return static_cast<int>(deg_.size()); }  // largest m in the support
  int total_degree() const;
  bool is_zero() const { return deg_.empty(); }
  const std::vector<int> &degrees() const { return deg_; }

  // Shifts degree m by +1 or -1. The caller guarantees the result is nonnegative.
  MultiIndex shifted(int m, int delta) const;

  // Graded order: total degree, then lexicographic on the dense vector.
  std::strong_ordering operator<=>(const MultiIndex &other) const;
  bool operator==(const MultiIndex &other) const { return deg_ == other.deg_; }

  // "(1 0 1)", padded with zeros to `width` entries.
  std::string str(int width = 0) const;
  static MultiIndex parse(const std::string &text);

private:
  std::vector<int> deg_;
};

// Sorted set of distinct multi-indices.
class MultiIndexSet
{
public:
  MultiIndexSet() = default;
  explicit MultiIndexSet(std::vector<MultiIndex> indices);

  // {0, e_1}
  static MultiIndexSet initial();

  int size() const { return static_cast<int>(items_.size()); }
  bool empty() const { return items_.empty(); }
  const MultiIndex &operator[](int i) const { return items_[i]; }
  const std::vector<MultiIndex> &items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  // Position or -1.
  int find(const MultiIndex &nu) const;
  bool contains(const MultiIndex &nu) const { return find(nu) >= 0; }
  bool contains_zero() const { return !items_.empty() && items_.front().is_zero(); }

  // Inserts what is not yet present, returns the number added.
  int insert(const std::vector<MultiIndex> &more);

  // M_P: largest parameter index in any support, 0 for {0}.
  int max_parameter() const;
  // Number of parameters with a nonzero degree somewhere in the set.
  int active_parameters() const;
  int max_degree() const;

  // Width used when printing: at least one entry.
  int print_width() const { return std::max(1, max_parameter()); }

private:
  std::vector<MultiIndex> items_;
};

/// Neighbours nu +- e_m of P outside P, for m up to M_P + m_bar.
MultiIndexSet detail_index_set(const MultiIndexSet &P, int m_bar);

}  // namespace sgfem

#endif  // SGFEM_CORE_CHAOS_HPP
