#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mvpose3d/types.hpp"

namespace mvpose3d {

// Rectangular cost matrix; rows are candidates (poses), columns are
// hypotheses (persons or live tracks). Entries are nonnegative, with
// kForbidden marking pairs that must not be matched.
using CostMatrix = Eigen::MatrixXd;

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;
};

namespace detail {

// Shortest-augmenting-path Kuhn-Munkres on a square matrix; returns row->col.
inline std::vector<int> munkres_square(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::max());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = std::numeric_limits<double>::max();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Optimum over the sub-instance spanned by `rows` x `cols`: first maximize
// the number of non-Forbidden pairs, then minimize their summed cost.
// Forbidden entries are padded to `big`, dummies to zero, so one Forbidden
// pick always outweighs any all-finite difference.
struct SubOptimum {
  int pairs = 0;
  double cost = 0.0;
};

inline SubOptimum sub_optimum(const CostMatrix& c, const std::vector<int>& rows,
                              const std::vector<int>& cols, double big) {
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(cols.size());
  if (nr == 0 || nc == 0) return {};
  const int n = std::max(nr, nc);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < nr; ++r)
    for (int q = 0; q < nc; ++q) {
      const double e = c(rows[r], cols[q]);
      padded(r, q) = is_forbidden(e) ? big : e;
    }
  const std::vector<int> sol = munkres_square(padded);
  SubOptimum opt;
  for (int r = 0; r < nr; ++r) {
    const int q = sol[r];
    if (q < nc && !is_forbidden(c(rows[r], cols[q]))) {
      ++opt.pairs;
      opt.cost += c(rows[r], cols[q]);
    }
  }
  return opt;
}

}  // namespace detail

// Minimum-cost bipartite matching. Among all matchings with the maximum
// number of non-Forbidden pairs, returns the one with the least total cost;
// remaining ties are broken toward the lexicographically smallest (row, col)
// pair list, so identical inputs always give identical output.
inline Assignment solve_bipartite(const CostMatrix& costs) {
  const int n_rows = static_cast<int>(costs.rows());
  const int n_cols = static_cast<int>(costs.cols());

  Assignment out;
  if (n_rows == 0 || n_cols == 0) {
    for (int r = 0; r < n_rows; ++r) out.unmatched_rows.push_back(r);
    for (int q = 0; q < n_cols; ++q) out.unmatched_cols.push_back(q);
    return out;
  }

  double max_finite = 0.0;
  for (int r = 0; r < n_rows; ++r)
    for (int q = 0; q < n_cols; ++q) {
      const double e = costs(r, q);
      if (is_forbidden(e)) continue;
      if (!(e >= 0.0) || !std::isfinite(e))
        throw std::invalid_argument("cost matrix entries must be >= 0");
      max_finite = std::max(max_finite, e);
    }
  const double big = (max_finite + 1.0) * (std::max(n_rows, n_cols) + 1);

  std::vector<int> rows(n_rows), cols(n_cols);
  for (int r = 0; r < n_rows; ++r) rows[r] = r;
  for (int q = 0; q < n_cols; ++q) cols[q] = q;

  const detail::SubOptimum target = detail::sub_optimum(costs, rows, cols, big);
  const double tol = 1e-9 * (1.0 + std::abs(target.cost));

  // Fix rows in order, preferring the smallest column that still permits an
  // optimal completion; a row stays unmatched only when no column does.
  std::vector<int> free_cols = cols;
  std::vector<int> free_rows;
  int fixed_pairs = 0;
  double fixed_cost = 0.0;
  std::vector<char> col_used(n_cols, 0);
  for (int r = 0; r < n_rows; ++r) {
    free_rows.clear();
    for (int rr = r + 1; rr < n_rows; ++rr) free_rows.push_back(rr);
    bool matched = false;
    for (int q = 0; q < n_cols && !matched; ++q) {
      if (col_used[q] || is_forbidden(costs(r, q))) continue;
      std::vector<int> rest_cols;
      for (int qq : free_cols)
        if (qq != q) rest_cols.push_back(qq);
      const auto sub = detail::sub_optimum(costs, free_rows, rest_cols, big);
      if (fixed_pairs + 1 + sub.pairs == target.pairs &&
          std::abs(fixed_cost + costs(r, q) + sub.cost - target.cost) <= tol) {
        out.pairs.emplace_back(r, q);
        col_used[q] = 1;
        free_cols.erase(std::find(free_cols.begin(), free_cols.end(), q));
        ++fixed_pairs;
        fixed_cost += costs(r, q);
        matched = true;
      }
    }
    if (!matched) out.unmatched_rows.push_back(r);
  }
  for (int q = 0; q < n_cols; ++q)
    if (!col_used[q]) out.unmatched_cols.push_back(q);
  out.total_cost = fixed_cost;
  return out;
}

}  // namespace mvpose3d
