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

//
// Cascade diversity measures (alpha-NDCG, ERR-IA, NRBP) in their shared
// intent-aware form
//
//   S = sum_i p_i sum_k g_i^k (1 - alpha)^{c_i^k} * disc(k)
//
// where c_i^k counts documents relevant to subtopic i ranked above k and
// disc(k) is 1/log2(k+1), 1/k or beta^{k-1} respectively. Raw scores are
// unnormalized; dcem() divides by the score of the greedy ideal ranking.
//

#ifndef DIVRANK_METRICS_HPP_
#define DIVRANK_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "divrank/core.hpp"

namespace divrank {

// Position discount for 1-based rank k.
double rank_discount(const MeasureParams& p, std::size_t k);

double raw_dcem(std::span<const DocIndex> ranking, const SubtopicJudgments& j,
                const MeasureParams& p);

// Incremental cascade state: per-subtopic counts of already ranked relevant
// documents, current rank and accumulated raw score.
class CascadeState {
 public:
  CascadeState(const SubtopicJudgments& judgments, const MeasureParams& params);

  // raw_dcem(ranking + doc) - raw_dcem(ranking) in O(M). Throws InvalidRanking
  // if doc is already ranked or out of range.
  double marginal_gain(DocIndex doc) const;
  // Appends doc and returns its marginal gain.
  double append(DocIndex doc);

  std::size_t rank() const { return ranking_.size(); }
  double score() const { return score_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  const Ranking& ranking() const { return ranking_; }
  bool contains(DocIndex doc) const { return doc < ranked_.size() && ranked_[doc]; }

 private:
  double gain_at(DocIndex doc, double discount) const;

  const SubtopicJudgments* judgments_;
  MeasureParams params_;
  std::vector<std::size_t> counts_;
  std::vector<double> novelty_;  // (1 - alpha)^{counts_[i]}
  std::vector<bool> ranked_;
  Ranking ranking_;
  double score_ = 0.0;
};

double marginal_gain(const CascadeState& state, DocIndex doc);

// Raw score of the greedy ideal ranking (length min(cutoff, n)). Zero iff no
// document is relevant to a subtopic with positive probability.
double ideal_raw_dcem(const QueryInstance& q, const MeasureParams& p);

// raw / ideal, clamped to [0,1]. Throws DegenerateQuery when the ideal is 0.
double dcem(std::span<const DocIndex> ranking, const QueryInstance& q,
            const MeasureParams& p);

// 1 - raw / ideal_score_raw, clamped to [0,1].
double dcem_loss(double ideal_score_raw, std::span<const DocIndex> ranking,
                 const QueryInstance& q, const MeasureParams& p);

// (1/M) sum_i |{relevant to i in top cutoff}| / cutoff.
double precision_ia(std::span<const DocIndex> ranking, const SubtopicJudgments& j,
                    std::size_t cutoff);

// Fraction of subtopics covered by the top cutoff documents.
double subtopic_recall(std::span<const DocIndex> ranking, const SubtopicJudgments& j,
                       std::size_t cutoff);

}  // namespace divrank

#endif  // DIVRANK_METRICS_HPP_
