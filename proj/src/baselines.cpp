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

#include "divrank/baselines.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "divrank/error.hpp"
#include "divrank/greedy.hpp"
#include "divrank/metrics.hpp"
#include "divrank/parallel.hpp"

namespace divrank {
namespace {

class MmrGain {
 public:
  MmrGain(std::span<const double> scores, const DenseMatrix& sim, double lambda)
      : scores_(scores), sim_(&sim), lambda_(lambda), max_sim_(scores.size(), 0.0) {}
  double gain(DocIndex d) const {
    if (first_) return scores_[d];
    return lambda_ * scores_[d] - (1.0 - lambda_) * max_sim_[d];
  }
  void commit(DocIndex s) {
    first_ = false;
    for (DocIndex d = 0; d < max_sim_.size(); ++d) {
      max_sim_[d] = std::max(max_sim_[d], (*sim_)(d, s));
    }
  }

 private:
  std::span<const double> scores_;
  const DenseMatrix* sim_;
  double lambda_;
  bool first_ = true;
  std::vector<double> max_sim_;
};

struct ScoreGain {
  std::span<const double> scores;
  double gain(DocIndex d) const { return scores[d]; }
  void commit(DocIndex) {}
};

}  // namespace

Ranking relevance_rank(std::span<const double> scores, std::size_t k) {
  ScoreGain model{scores};
  return greedy_select(scores.size(), k, model);
}

Ranking mmr_rank(std::span<const double> scores, const DenseMatrix& sim, double lambda,
                 std::size_t k) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument(fmt::format("lambda {} outside [0,1]", lambda));
  }
  if (sim.rows() != scores.size() || sim.cols() != scores.size()) {
    throw InvalidArgument("similarity matrix does not match the score vector");
  }
  MmrGain model(scores, sim, lambda);
  return greedy_select(scores.size(), k, model);
}

std::vector<double> feature_scores(const QueryInstance& q, std::size_t feature) {
  std::vector<double> out(q.num_docs());
  for (DocIndex d = 0; d < q.num_docs(); ++d) {
    const auto& rel = q.docs[d].relevance_features;
    if (feature >= rel.size()) {
      throw InvalidArgument(fmt::format("score feature {} out of range (R = {})", feature,
                                        rel.size()));
    }
    out[d] = rel[feature];
  }
  return out;
}

DenseMatrix similarity_from_channel(const QueryInstance& q, std::size_t channel) {
  if (channel >= q.pairwise.num_channels()) {
    throw InvalidArgument(fmt::format("similarity channel {} out of range (F = {})", channel,
                                      q.pairwise.num_channels()));
  }
  const std::size_t n = q.num_docs();
  DenseMatrix sim(n, n, 1.0);
  for (DocIndex i = 0; i < n; ++i) {
    for (DocIndex j = 0; j < n; ++j) {
      if (i != j) sim(i, j) = 1.0 - q.pairwise.at(i, j, channel);
    }
  }
  return sim;
}

Ranking mmr_for_query(const QueryInstance& q, const MmrSettings& s, double lambda,
                      std::size_t k) {
  const std::vector<double> scores = feature_scores(q, s.score_feature);
  return mmr_rank(scores, similarity_from_channel(q, s.sim_channel), lambda, k);
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

LambdaTuning tune_lambda(std::span<const QueryInstance> validation, const MmrSettings& s,
                         std::span<const double> grid, const MeasureParams& p,
                         std::size_t threads) {
  if (grid.empty()) throw InvalidArgument("lambda grid is empty");
  for (double l : grid) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgument(fmt::format("lambda {} outside [0,1]", l));
  }
  LambdaTuning out;
  out.scores.assign(grid.size(), 0.0);
  std::vector<std::vector<double>> per_query(validation.size(),
                                             std::vector<double>(grid.size(), 0.0));
  std::vector<char> used(validation.size(), 0);
  parallel_for(validation.size(), threads, [&](std::size_t qi) {
    const auto& q = validation[qi];
    if (!q.judgments.any_relevant()) return;
    used[qi] = 1;
    const std::vector<double> scores = feature_scores(q, s.score_feature);
    const DenseMatrix sim = similarity_from_channel(q, s.sim_channel);
    const std::size_t k = std::min(p.cutoff, q.num_docs());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      per_query[qi][g] = dcem(mmr_rank(scores, sim, grid[g], k), q, p);
    }
  });
  const auto count = static_cast<double>(std::count(used.begin(), used.end(), 1));
  for (std::size_t qi = 0; qi < validation.size(); ++qi) {
    if (used[qi] == 0) continue;
    for (std::size_t g = 0; g < grid.size(); ++g) out.scores[g] += per_query[qi][g];
  }
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (count > 0) out.scores[g] /= count;
    if (out.scores[g] > out.scores[best]) best = g;
  }
  out.lambda = grid[best];
  return out;
}

}  // namespace divrank
