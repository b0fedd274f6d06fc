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

#ifndef DIVRANK_BASELINES_HPP_
#define DIVRANK_BASELINES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "divrank/core.hpp"
#include "divrank/features.hpp"

namespace divrank {

// Indices sorted by score descending (ties by index), truncated to k.
Ranking relevance_rank(std::span<const double> scores, std::size_t k);

// Maximal marginal relevance: repeatedly appends the argmax of
//   lambda * score(d) - (1 - lambda) * max_{s selected} sim(d, s)
// The first pick is the argmax score. Throws InvalidArgument unless
// lambda is in [0,1].
Ranking mmr_rank(std::span<const double> scores, const DenseMatrix& sim, double lambda,
                 std::size_t k);

// Baseline relevance score of each document: one relevance-feature column.
std::vector<double> feature_scores(const QueryInstance& q, std::size_t feature);

// 1 - channel value, with a unit diagonal.
DenseMatrix similarity_from_channel(const QueryInstance& q, std::size_t channel);

struct MmrSettings {
  std::size_t score_feature = 0;
  std::size_t sim_channel = static_cast<std::size_t>(DiversityChannel::kText);
};

Ranking mmr_for_query(const QueryInstance& q, const MmrSettings& s, double lambda,
                      std::size_t k);

// {0, 0.1, ..., 1}.
std::vector<double> default_lambda_grid();

struct LambdaTuning {
  double lambda = 0.0;
  std::vector<double> scores;  // mean validation measure per grid value
};

// Picks the grid value with the best mean dcem (first on ties) over the
// non-degenerate validation queries.
LambdaTuning tune_lambda(std::span<const QueryInstance> validation, const MmrSettings& s,
                         std::span<const double> grid, const MeasureParams& p,
                         std::size_t threads = 1);

}  // namespace divrank

#endif  // DIVRANK_BASELINES_HPP_
