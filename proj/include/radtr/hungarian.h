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

// Minimum-cost injective assignment of ground-truth objects to queries.

#ifndef RADTR_HUNGARIAN_H_
#define RADTR_HUNGARIAN_H_

#include <cstdint>
#include <utility>
#include <vector>

namespace radtr {

// queries x ground-truth costs, row-major.
struct CostMatrix {
  std::int64_t queries = 0;
  std::int64_t objects = 0;
  std::vector<double> values;

  double at(std::int64_t query, std::int64_t object) const {
    return values[query * objects + object];
  }
};

struct MatchAssignment {
  // (query, object), one entry per object, ordered by object index.
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  double cost = 0.0;
};

// Assigns every object to a distinct query with minimum total cost
// (O(G^2 M) potentials-based Hungarian algorithm). Among optimal
// assignments, returns the one whose query sequence (ordered by object) is
// lexicographically smallest. Throws ArgumentError for non-finite costs or
// more objects than queries.
MatchAssignment HungarianMatch(const CostMatrix& cost);

}  // namespace radtr

#endif  // RADTR_HUNGARIAN_H_
