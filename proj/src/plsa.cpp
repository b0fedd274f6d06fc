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

#include "divrank/plsa.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include <fmt/format.h>

#include "divrank/error.hpp"

namespace divrank {
namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void normalize_row(std::span<double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  if (sum > 0.0) {
    for (double& v : row) v /= sum;
  } else {
    for (double& v : row) v = 1.0 / static_cast<double>(row.size());
  }
}

void normalize_columns(DenseMatrix& m) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, c);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      m(r, c) = sum > 0.0 ? m(r, c) / sum : 1.0 / static_cast<double>(m.rows());
    }
  }
}

}  // namespace

double plsa_log_likelihood(const Corpus& corpus, const TopicModel& model) {
  const std::size_t m = model.num_topics;
  double ll = 0.0;
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    const auto theta = model.doc_topic.row(d);
    for (const auto& [w, count] : corpus.docs[d]) {
      const auto phi = model.word_topic.row(w);
      double p = 0.0;
      for (std::size_t z = 0; z < m; ++z) p += theta[z] * phi[z];
      ll += count * std::log(p);
    }
  }
  return ll;
}

TopicModel plsa_fit(const Corpus& corpus, const PlsaOptions& options) {
  if (options.num_topics < 1) throw InvalidArgument("pLSA needs at least one topic");
  if (corpus.docs.empty()) throw InvalidArgument("pLSA corpus is empty");
  if (corpus.vocab_size == 0) throw InvalidArgument("pLSA corpus has an empty vocabulary");
  for (const auto& row : corpus.docs) {
    for (const auto& [w, count] : row) {
      if (w >= corpus.vocab_size || !(count >= 0.0)) {
        throw InvalidArgument(fmt::format("bad corpus entry (term {}, count {})", w, count));
      }
    }
  }

  const std::size_t n = corpus.docs.size();
  const std::size_t v = corpus.vocab_size;
  const std::size_t m = options.num_topics;

  TopicModel model;
  model.num_topics = m;
  model.doc_topic = DenseMatrix(n, m);
  model.word_topic = DenseMatrix(v, m);

  // Topic mixtures start uniform; the random word distributions break the
  // symmetry, so identical documents follow identical EM trajectories.
  std::mt19937_64 rng(options.seed);
  for (std::size_t d = 0; d < n; ++d) {
    for (double& x : model.doc_topic.row(d)) x = 1.0 / static_cast<double>(m);
  }
  for (std::size_t w = 0; w < v; ++w) {
    for (std::size_t z = 0; z < m; ++z) model.word_topic(w, z) = 0.5 + unit_draw(rng);
  }
  normalize_columns(model.word_topic);

  DenseMatrix next_doc_topic(n, m);
  DenseMatrix next_word_topic(v, m);
  DenseMatrix prior_doc_topic;
  DenseMatrix prior_word_topic;
  std::vector<double> post(m);
  double previous = 0.0;

  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    next_word_topic = DenseMatrix(v, m);
    double ll = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      const auto theta = model.doc_topic.row(d);
      auto acc = next_doc_topic.row(d);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const auto& [w, count] : corpus.docs[d]) {
        if (count == 0.0) continue;
        const auto phi = model.word_topic.row(w);
        double norm = 0.0;
        for (std::size_t z = 0; z < m; ++z) {
          post[z] = theta[z] * phi[z];
          norm += post[z];
        }
        ll += count * std::log(norm);
        auto wacc = next_word_topic.row(w);
        for (std::size_t z = 0; z < m; ++z) {
          const double r = count * post[z] / norm;
          acc[z] += r;
          wacc[z] += r;
        }
      }
    }
    // ll is the likelihood of the parameters entering this iteration. EM
    // cannot lower it, so a drop is rounding at the fixed point: keep the
    // parameters that scored previous.
    if (iter > 0 && ll < previous) {
      model.doc_topic = std::move(prior_doc_topic);
      model.word_topic = std::move(prior_word_topic);
      model.converged = true;
      break;
    }
    model.log_likelihood_trace.push_back(ll);
    if (iter > 0 && ll - previous < options.tol * std::abs(previous)) {
      model.converged = true;
      break;
    }
    previous = ll;
    prior_doc_topic = model.doc_topic;
    prior_word_topic = model.word_topic;

    for (std::size_t d = 0; d < n; ++d) {
      if (corpus.docs[d].empty()) continue;
      auto row = model.doc_topic.row(d);
      const auto acc = next_doc_topic.row(d);
      std::copy(acc.begin(), acc.end(), row.begin());
      normalize_row(row);
    }
    model.word_topic = next_word_topic;
    normalize_columns(model.word_topic);
  }
  if (!model.converged) {
    const double final_ll = plsa_log_likelihood(corpus, model);
    if (!model.log_likelihood_trace.empty() && final_ll < model.log_likelihood_trace.back()) {
      model.doc_topic = std::move(prior_doc_topic);
      model.word_topic = std::move(prior_word_topic);
    } else {
      model.log_likelihood_trace.push_back(final_ll);
    }
  }
  return model;
}

double topic_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("topic rows differ in length");
  double s = 0.0;
  for (std::size_t z = 0; z < a.size(); ++z) {
    const double diff = a[z] - b[z];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double topic_distance(DocIndex i, DocIndex j, const TopicModel& model) {
  if (i >= model.doc_topic.rows() || j >= model.doc_topic.rows()) {
    throw InvalidArgument("document not covered by the topic model");
  }
  return topic_distance(model.doc_topic.row(i), model.doc_topic.row(j));
}

}  // namespace divrank
