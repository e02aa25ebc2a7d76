/* Copyright 2026 The radtr Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "radtr/hungarian.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radtr/errors.h"

namespace radtr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest augmenting path Hungarian with row/column potentials. Rows are
// objects, columns are queries; `allowed` masks out columns and rows already
// fixed by the caller. Returns column assigned to each row (or -1 for rows
// not in `rows`).
std::vector<std::int64_t> Solve(const CostMatrix& c,
                                const std::vector<std::int64_t>& rows,
                                const std::vector<std::int64_t>& cols) {
  const std::size_t n = rows.size();
  const std::size_t m = cols.size();
  // 1-based arrays as in the classical formulation.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = c.at(cols[j - 1], rows[i0 - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::int64_t> assigned(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) assigned[p[j] - 1] = cols[j - 1];
  }
  return assigned;
}

double AssignmentCost(const CostMatrix& c, const std::vector<std::int64_t>& rows,
                      const std::vector<std::int64_t>& assigned) {
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) total += c.at(assigned[i], rows[i]);
  return total;
}

}  // namespace

MatchAssignment HungarianMatch(const CostMatrix& cost) {
  if (cost.queries < 0 || cost.objects < 0 ||
      static_cast<std::int64_t>(cost.values.size()) != cost.queries * cost.objects) {
    throw ArgumentError("cost matrix size does not match its dimensions");
  }
  if (cost.objects > cost.queries) {
    throw ArgumentError(std::to_string(cost.objects) + " objects exceed " +
                        std::to_string(cost.queries) + " queries");
  }
  for (double v : cost.values) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite matching cost");
  }
  MatchAssignment result;
  if (cost.objects == 0) return result;

  std::vector<std::int64_t> rows(cost.objects), cols(cost.queries);
  for (std::int64_t i = 0; i < cost.objects; ++i) rows[i] = i;
  for (std::int64_t j = 0; j < cost.queries; ++j) cols[j] = j;
  const double optimum = AssignmentCost(cost, rows, Solve(cost, rows, cols));
  double scale = 0.0;
  for (double v : cost.values) scale = std::max(scale, std::abs(v));
  const double tolerance = 1e-12 * std::max(1.0, scale) * static_cast<double>(cost.objects);

  // Fix objects in order, each to the smallest query that still admits an
  // optimal completion.
  double fixed_cost = 0.0;
  for (std::int64_t obj = 0; obj < cost.objects; ++obj) {
    rows.erase(rows.begin());
    bool fixed = false;
    for (std::size_t k = 0; k < cols.size() && !fixed; ++k) {
      const std::int64_t query = cols[k];
      std::vector<std::int64_t> rest_cols = cols;
      rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(k));
      double total = fixed_cost + cost.at(query, obj);
      if (!rows.empty()) total += AssignmentCost(cost, rows, Solve(cost, rows, rest_cols));
      if (total <= optimum + tolerance) {
        result.pairs.emplace_back(query, obj);
        fixed_cost += cost.at(query, obj);
        cols = std::move(rest_cols);
        fixed = true;
      }
    }
    if (!fixed) throw ArgumentError("matching failed to reproduce its optimum");
  }
  result.cost = fixed_cost;
  return result;
}

}  // namespace radtr
