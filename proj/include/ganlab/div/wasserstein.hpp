#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/dist/distributions.hpp"

namespace ganlab::div {

using dist::Matrix;

struct Assignment {
  std::vector<Index> row_to_col;
  double total_cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (shortest
/// augmenting paths with row/column potentials, O(n^3)).
inline Assignment min_cost_assignment(const Matrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw std::invalid_argument("min_cost_assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual source.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  std::vector<double> minv(static_cast<std::size_t>(n + 1));
  std::vector<char> used(static_cast<std::size_t>(n + 1));

  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(col0)] = 1;
      const Index row0 = match[static_cast<std::size_t>(col0)];
      double delta = inf;
      Index col1 = 0;
      for (Index col = 1; col <= n; ++col) {
        const auto c = static_cast<std::size_t>(col);
        if (used[c]) continue;
        const double reduced = cost(row0 - 1, col - 1) - u[static_cast<std::size_t>(row0)] - v[c];
        if (reduced < minv[c]) {
          minv[c] = reduced;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = col;
        }
      }
      for (Index col = 0; col <= n; ++col) {
        const auto c = static_cast<std::size_t>(col);
        if (used[c]) {
          u[static_cast<std::size_t>(match[c])] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[static_cast<std::size_t>(col0)] != 0);
    do {
      const Index col1 = way[static_cast<std::size_t>(col0)];
      match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }

  Assignment out;
  out.row_to_col.assign(static_cast<std::size_t>(n), -1);
  for (Index col = 1; col <= n; ++col) out.row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(col)] - 1)] = col - 1;
  for (Index r = 0; r < n; ++r) out.total_cost += cost(r, out.row_to_col[static_cast<std::size_t>(r)]);
  return out;
}

/// Euclidean distances between the rows of a and the rows of b.
inline Matrix pairwise_distances(const dist::EmpiricalDistribution& a, const dist::EmpiricalDistribution& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("pairwise_distances: dimension mismatch");
  const Matrix& x = a.samples();
  const Matrix& y = b.samples();
  Matrix out(x.rows(), y.rows());
  for (Index j = 0; j < y.rows(); ++j)
    out.col(j) = (x.rowwise() - y.row(j)).rowwise().norm();
  return out;
}

/// Exact 1-Wasserstein distance between two uniform empirical distributions
/// of equal size: (1/m) times the minimum-cost perfect matching.
inline double wasserstein_exact(const dist::EmpiricalDistribution& a, const dist::EmpiricalDistribution& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wasserstein_exact: sample counts differ (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  const Matrix cost = pairwise_distances(a, b);
  const Assignment match = min_cost_assignment(cost);
  // Summing the matched costs in sorted order makes the result independent
  // of argument order.
  std::vector<double> pairs;
  pairs.reserve(match.row_to_col.size());
  for (std::size_t i = 0; i < match.row_to_col.size(); ++i)
    pairs.push_back(cost(static_cast<Index>(i), match.row_to_col[i]));
  std::sort(pairs.begin(), pairs.end());
  double total = 0.0;
  for (double c : pairs) total += c;
  return total / static_cast<double>(a.size());
}

}  // namespace ganlab::div
