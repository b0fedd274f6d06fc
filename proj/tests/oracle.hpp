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
// Reference implementations used as test oracles. They share no code with
// the library: plain nested vectors in, direct loops, no incremental state.
//

#ifndef DIVRANK_TESTS_ORACLE_HPP_
#define DIVRANK_TESTS_ORACLE_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "divrank/core.hpp"

namespace oracle {

enum class Kind { kAlphaNdcg, kErrIa, kNrbp };

struct Judged {
  std::vector<double> probs;             // per subtopic
  std::vector<std::vector<int>> rel;     // rel[subtopic][doc] in {0,1}
};

// Cascade score evaluated position by position: for rank k the count of
// earlier documents relevant to each subtopic is recounted from scratch.
double cascade_score(const std::vector<std::size_t>& ranking, const Judged& j, Kind kind,
                     double alpha, double beta);

// Best ordered k-tuple by enumerating every permutation of every k-subset.
double best_cascade_score(std::size_t n, std::size_t k, const Judged& j, Kind kind,
                          double alpha, double beta);

// Stable sort by score, descending.
std::vector<std::size_t> sort_by_score(const std::vector<double>& scores, std::size_t k);

// MMR written out longhand.
std::vector<std::size_t> mmr(const std::vector<double>& scores,
                             const std::vector<std::vector<double>>& sim, double lambda,
                             std::size_t k);

// Sum of relevance vectors plus sum over unordered pairs of pair vectors,
// dotted with the weights.
double bicriteria_score(const std::vector<std::size_t>& ranking,
                        const std::vector<std::vector<double>>& rel_features,
                        const std::vector<std::vector<std::vector<double>>>& pair_features,
                        const std::vector<double>& w_rel, const std::vector<double>& w_div);

// Adapters from library types.
Judged judged_from(const divrank::SubtopicJudgments& j);
Kind kind_from(divrank::Measure m);

// Random query instance with n documents, m subtopics, R relevance features
// and F channels. Judgments are binary with the given relevance rate;
// subtopic probabilities are random and normalized.
divrank::QueryInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                       std::size_t rel_dim, std::size_t channels,
                                       double relevance_rate = 0.4,
                                       bool uniform_probs = false);

}  // namespace oracle

#endif  // DIVRANK_TESTS_ORACLE_HPP_
