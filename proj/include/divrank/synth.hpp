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
// Synthetic diversification data.
//
// Each relevant document belongs to one latent subtopic; irrelevant
// documents belong to none. With probability `redundancy` a relevant
// document is put on subtopic 0, so the candidate set is dominated by one
// intent. Relevance feature r mixes the relevance label with uniform noise,
// label weight (r + 1) / R, so the last feature is the clean label. Feature
// 0 additionally favours the dominant subtopic, like a query-likelihood
// score that matches the most popular reading of the query. Pairwise
// channel f is high for documents of different groups, with signal weight
// signal * (F - f) / F; every irrelevant document is a group of its own.
// Gaussian noise of scale sigma is added to every value before clamping.
//

#ifndef DIVRANK_SYNTH_HPP_
#define DIVRANK_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "divrank/core.hpp"
#include "divrank/io.hpp"

namespace divrank {

struct SynthConfig {
  std::size_t num_queries = 100;
  std::size_t num_docs = 50;
  std::size_t num_subtopics = 4;
  std::size_t rel_dim = 8;
  std::size_t num_channels = 7;
  double sigma = 0.2;
  double signal = 1.0;
  double redundancy = 0.5;
  double irrelevant_rate = 0.5;
  // Weight of the dominant-subtopic bonus in relevance feature 0.
  double popularity_bias = 0.3;
  std::uint64_t seed = 1;
  // Fractions of queries labelled train and val; the rest are test.
  double train_fraction = 0.6;
  double val_fraction = 0.2;

  void validate() const;
};

Dataset generate(const SynthConfig& config);

// Weights that rank a perfect diversified list when sigma = 0 and
// signal = 1: a dominant weight on the clean relevance feature and a unit
// weight on the clean diversity channel.
WeightVector oracle_weights(const SynthConfig& config);

// Latent group of each document of a generated query: its subtopic, or
// M + d for an irrelevant document d.
std::vector<std::size_t> latent_groups(const QueryInstance& q);

}  // namespace divrank

#endif  // DIVRANK_SYNTH_HPP_
