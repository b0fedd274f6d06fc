// Copyright 2026 The divrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIVRANK_GREEDY_HPP_
#define DIVRANK_GREEDY_HPP_

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "divrank/core.hpp"

namespace divrank {

// A stateful marginal-gain oracle: gain(d) is the value of appending d to the
// current prefix, commit(d) appends it.
template <class T>
concept GainModel = requires(T& m, const T& cm, DocIndex d) {
  { cm.gain(d) } -> std::convertible_to<double>;
  m.commit(d);
};

// Appends, min(k, n) times, the unselected candidate with the largest gain.
// Ties go to the lowest index. Zero-gain candidates are still appended.
template <GainModel Model>
Ranking greedy_select(std::size_t n, std::size_t k, Model& model) {
  const std::size_t steps = std::min(k, n);
  Ranking ranking;
  ranking.reserve(steps);
  std::vector<bool> taken(n, false);
  for (std::size_t step = 0; step < steps; ++step) {
    DocIndex best = n;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (DocIndex d = 0; d < n; ++d) {
      if (taken[d]) continue;
      const double g = model.gain(d);
      if (best == n || g > best_gain) {
        best = d;
        best_gain = g;
      }
    }
    taken[best] = true;
    ranking.push_back(best);
    model.commit(best);
  }
  return ranking;
}

// Stateless form: gain(prefix, candidate).
using GainOracle = std::function<double(std::span<const DocIndex>, DocIndex)>;
Ranking greedy_select(std::size_t n, std::size_t k, const GainOracle& gain);

// Greedy ideal ranking over the true judgments, length min(cutoff, n).
// Throws DegenerateQuery when no document is relevant.
Ranking build_target(const QueryInstance& q, const MeasureParams& p);

// Ordered k-tuple maximizing raw_dcem; ties resolved to the lexicographically
// smallest tuple. Requires n <= 10 and k <= 5.
Ranking exhaustive_best(const QueryInstance& q, const MeasureParams& p, std::size_t k);

// Calls visit(tuple) for every ordered tuple of min(k, n) distinct indices
// in lexicographic order.
void for_each_ordered_tuple(std::size_t n, std::size_t k,
                            const std::function<void(std::span<const DocIndex>)>& visit);

}  // namespace divrank

#endif  // DIVRANK_GREEDY_HPP_
