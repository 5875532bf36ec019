#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "atlas/rational.hpp"

namespace atlas::exact {

using Matrix = std::vector<std::vector<Rational>>;

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
inline std::size_t rank(std::vector<std::vector<BigInt>> a) {
  if (a.empty()) return 0;
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  std::size_t r = 0;
  BigInt prev = 1;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        BigInt v = a[r][c] * a[i][j] - a[i][c] * a[r][j];
        a[i][j] = v / prev;
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

/// Affine dimension of a point set: rank of the differences to the first point.
template <class Row>
std::size_t affine_dimension(const std::vector<Row>& points) {
  if (points.size() <= 1) return 0;
  std::vector<std::vector<BigInt>> diffs;
  diffs.reserve(points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::vector<BigInt> d(points[i].size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = BigInt(static_cast<long>(points[i][k])) - BigInt(static_cast<long>(points[0][k]));
    diffs.push_back(std::move(d));
  }
  return rank(std::move(diffs));
}

/// Maximal linearly independent subset of the rows of [A | b], scanning rows in order.
/// When some row of A is a combination of earlier rows but b is not the same combination,
/// `inconsistency` holds y with y^T A = 0 and y^T b > 0.
struct RowSelection {
  std::vector<std::size_t> rows;
  std::optional<std::vector<Rational>> inconsistency;
};

inline RowSelection independent_rows(const Matrix& a, const std::vector<Rational>& b) {
  RowSelection sel;
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a.front().size() : 0;
  struct Basis {
    std::size_t pivot;
    std::vector<Rational> row;
    Rational rhs;
    std::vector<Rational> combo;
  };
  std::vector<Basis> basis;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<Rational> row = a[i];
    Rational rhs = b[i];
    std::vector<Rational> combo(rows, Rational(0));
    combo[i] = 1;
    for (const auto& e : basis) {
      if (row[e.pivot] == 0) continue;
      Rational f = row[e.pivot] / e.row[e.pivot];
      for (std::size_t j = 0; j < cols; ++j)
        if (e.row[j] != 0) row[j] -= f * e.row[j];
      rhs -= f * e.rhs;
      for (std::size_t j = 0; j < rows; ++j)
        if (e.combo[j] != 0) combo[j] -= f * e.combo[j];
    }
    std::size_t pivot = 0;
    while (pivot < cols && row[pivot] == 0) ++pivot;
    if (pivot == cols) {
      if (rhs != 0 && !sel.inconsistency) {
        if (rhs < 0)
          for (auto& v : combo) v = -v;
        sel.inconsistency = std::move(combo);
      }
      continue;
    }
    sel.rows.push_back(i);
    basis.push_back({pivot, std::move(row), std::move(rhs), std::move(combo)});
  }
  return sel;
}

/// Outcome of the phase-one simplex for {x >= 0 : A x = b}.
struct Feasibility {
  bool feasible = false;
  std::vector<Rational> x;       ///< a basic feasible solution when feasible
  std::vector<Rational> farkas;  ///< y with y^T A <= 0 and y^T b > 0 when infeasible
  std::size_t pivots = 0;
};

/// Exact phase-one simplex on a dense tableau with Bland's rule. Rows with negative right-hand
/// side are negated first; artificial variables start basic. A positive optimum of the sum of
/// artificials certifies infeasibility and the optimal dual is returned as a Farkas vector.
inline Feasibility solve_feasibility(const Matrix& a, const std::vector<Rational>& b) {
  const std::size_t m = a.size();
  const std::size_t n = m ? a.front().size() : 0;
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<int> sign(m, 1);
  Matrix t(m, std::vector<Rational>(width, Rational(0)));
  for (std::size_t i = 0; i < m; ++i) {
    sign[i] = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sign[i] < 0 ? Rational(-a[i][j]) : a[i][j];
    t[i][n + i] = 1;
    t[i][rhs] = sign[i] < 0 ? Rational(-b[i]) : b[i];
  }
  // Reduced costs of phase one: c_j - 1^T column_j (artificials cost 1).
  std::vector<Rational> cost(width, Rational(0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) cost[j] -= t[i][j];
  for (std::size_t i = 0; i < m; ++i) cost[rhs] -= t[i][rhs];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  Feasibility result;
  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < rhs; ++j)
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == width) break;
    std::size_t leave = m;
    Rational best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][rhs] / t[i][enter];
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = std::move(ratio);
      }
    }
    // Phase one is bounded below by zero, so an entering column always has a positive entry.
    Rational piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < width; ++j)
      if (t[leave][j] != 0) support.push_back(j);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rational f = t[i][enter];
      for (std::size_t j : support) t[i][j] -= f * t[leave][j];
    }
    if (cost[enter] != 0) {
      Rational f = cost[enter];
      for (std::size_t j : support) cost[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
    ++result.pivots;
  }

  // cost[rhs] holds minus the objective value.
  if (cost[rhs] == 0) {
    result.feasible = true;
    result.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) result.x[basis[i]] = t[i][rhs];
    return result;
  }
  result.farkas.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rational y = Rational(1) - cost[n + i];
    result.farkas[i] = sign[i] < 0 ? Rational(-y) : y;
  }
  return result;
}

}  // namespace atlas::exact
