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

#ifndef DIVRANK_PLSA_HPP_
#define DIVRANK_PLSA_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "divrank/core.hpp"

namespace divrank {

// Sparse document-term count matrix.
struct Corpus {
  using Row = std::vector<std::pair<std::uint32_t, double>>;
  std::size_t vocab_size = 0;
  std::vector<Row> docs;
};

struct TopicModel {
  std::size_t num_topics = 0;
  DenseMatrix doc_topic;   // n x m, p(z|d), rows sum to 1
  DenseMatrix word_topic;  // V x m, p(w|z), columns sum to 1
  std::vector<double> log_likelihood_trace;
  bool converged = false;
};

struct PlsaOptions {
  std::size_t num_topics = 20;
  std::size_t max_iters = 200;
  // Stop once the relative log-likelihood improvement drops below tol.
  double tol = 1e-4;
  std::uint64_t seed = 1;
};

// Fits pLSA by EM from a seeded random start. Documents without terms get a
// uniform topic distribution. Deterministic given the seed.
TopicModel plsa_fit(const Corpus& corpus, const PlsaOptions& options);

// Log-likelihood sum_d sum_w n(d,w) log sum_z p(z|d) p(w|z).
double plsa_log_likelihood(const Corpus& corpus, const TopicModel& model);

double topic_distance(std::span<const double> a, std::span<const double> b);
double topic_distance(DocIndex i, DocIndex j, const TopicModel& model);

}  // namespace divrank

#endif  // DIVRANK_PLSA_HPP_
