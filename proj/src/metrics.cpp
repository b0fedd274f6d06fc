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

#include "divrank/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "divrank/error.hpp"
#include "divrank/greedy.hpp"

namespace divrank {

double rank_discount(const MeasureParams& p, std::size_t k) {
  switch (p.measure) {
    case Measure::kAlphaNdcg:
      return 1.0 / std::log2(static_cast<double>(k) + 1.0);
    case Measure::kErrIa:
      return 1.0 / static_cast<double>(k);
    case Measure::kNrbp:
      return std::pow(p.beta, static_cast<double>(k) - 1.0);
  }
  return 0.0;
}

double raw_dcem(std::span<const DocIndex> ranking, const SubtopicJudgments& j,
                const MeasureParams& p) {
  check_ranking(ranking, j.num_docs, p.cutoff);
  CascadeState state(j, p);
  for (DocIndex d : ranking) state.append(d);
  return state.score();
}

CascadeState::CascadeState(const SubtopicJudgments& judgments,
                           const MeasureParams& params)
    : judgments_(&judgments),
      params_(params),
      counts_(judgments.num_subtopics, 0),
      novelty_(judgments.num_subtopics, 1.0),
      ranked_(judgments.num_docs, false) {}

double CascadeState::gain_at(DocIndex doc, double discount) const {
  double gain = 0.0;
  const auto& j = *judgments_;
  for (std::size_t i = 0; i < j.num_subtopics; ++i) {
    if (j.relevant(i, doc)) gain += j.probs[i] * novelty_[i];
  }
  return gain * discount;
}

double CascadeState::marginal_gain(DocIndex doc) const {
  if (doc >= ranked_.size()) {
    throw InvalidRanking(fmt::format("document index {} out of range", doc));
  }
  if (ranked_[doc]) {
    throw InvalidRanking(fmt::format("document {} is already ranked", doc));
  }
  return gain_at(doc, rank_discount(params_, ranking_.size() + 1));
}

double CascadeState::append(DocIndex doc) {
  const double gain = marginal_gain(doc);
  const auto& j = *judgments_;
  const double keep = 1.0 - params_.alpha;
  for (std::size_t i = 0; i < j.num_subtopics; ++i) {
    if (j.relevant(i, doc)) {
      ++counts_[i];
      novelty_[i] = std::pow(keep, static_cast<double>(counts_[i]));
    }
  }
  ranked_[doc] = true;
  ranking_.push_back(doc);
  score_ += gain;
  return gain;
}

double marginal_gain(const CascadeState& state, DocIndex doc) {
  return state.marginal_gain(doc);
}

double ideal_raw_dcem(const QueryInstance& q, const MeasureParams& p) {
  if (!q.judgments.any_relevant()) return 0.0;
  return raw_dcem(build_target(q, p), q.judgments, p);
}

double dcem(std::span<const DocIndex> ranking, const QueryInstance& q,
            const MeasureParams& p) {
  const double ideal = ideal_raw_dcem(q, p);
  if (ideal <= 0.0) {
    throw DegenerateQuery(fmt::format("query {} has no relevant documents", q.query_id));
  }
  return std::clamp(raw_dcem(ranking, q.judgments, p) / ideal, 0.0, 1.0);
}

double dcem_loss(double ideal_score_raw, std::span<const DocIndex> ranking,
                 const QueryInstance& q, const MeasureParams& p) {
  if (!(ideal_score_raw > 0.0)) {
    throw DegenerateQuery(fmt::format("query {} has a zero ideal score", q.query_id));
  }
  return std::clamp(1.0 - raw_dcem(ranking, q.judgments, p) / ideal_score_raw, 0.0, 1.0);
}

double precision_ia(std::span<const DocIndex> ranking, const SubtopicJudgments& j,
                    std::size_t cutoff) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  check_ranking(ranking, j.num_docs, ranking.size());
  if (j.num_subtopics == 0) return 0.0;
  const std::size_t depth = std::min(cutoff, ranking.size());
  double total = 0.0;
  for (std::size_t i = 0; i < j.num_subtopics; ++i) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < depth; ++k) hits += j.relevant(i, ranking[k]) ? 1 : 0;
    total += static_cast<double>(hits) / static_cast<double>(cutoff);
  }
  return total / static_cast<double>(j.num_subtopics);
}

double subtopic_recall(std::span<const DocIndex> ranking, const SubtopicJudgments& j,
                       std::size_t cutoff) {
  check_ranking(ranking, j.num_docs, ranking.size());
  if (j.num_subtopics == 0) return 0.0;
  const std::size_t depth = std::min(cutoff, ranking.size());
  std::size_t covered = 0;
  for (std::size_t i = 0; i < j.num_subtopics; ++i) {
    for (std::size_t k = 0; k < depth; ++k) {
      if (j.relevant(i, ranking[k])) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(j.num_subtopics);
}

}  // namespace divrank
