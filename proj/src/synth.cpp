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

#include "divrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "divrank/error.hpp"
#include "divrank/features.hpp"

namespace divrank {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<std::string> synth_channel_names(std::size_t f) {
  std::vector<std::string> names;
  const auto known = all_channels();
  for (std::size_t c = 0; c < f; ++c) {
    names.emplace_back(c < known.size() ? std::string(channel_name(known[c]))
                                        : fmt::format("channel{}", c));
  }
  return names;
}

QueryInstance make_query(const SynthConfig& cfg, std::size_t qi) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(qi)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto noise = [&] { return cfg.sigma > 0.0 ? cfg.sigma * gauss(rng) : 0.0; };

  const std::size_t n = cfg.num_docs;
  const std::size_t m = cfg.num_subtopics;
  QueryInstance q;
  q.query_id = fmt::format("q{:03d}", qi + 1);
  q.judgments = SubtopicJudgments::uniform(m, n);

  // Latent group: subtopic index, or m + d for an irrelevant document.
  std::vector<std::size_t> group(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (unit(rng) < cfg.irrelevant_rate) {
      group[d] = m + d;
    } else if (unit(rng) < cfg.redundancy) {
      group[d] = 0;
    } else {
      group[d] = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    }
    if (group[d] < m) q.judgments.set_relevant(group[d], d, true);
  }

  const auto r_dim = static_cast<double>(cfg.rel_dim);
  for (std::size_t d = 0; d < n; ++d) {
    DocumentRecord doc;
    doc.doc_id = fmt::format("{}-d{:03d}", q.query_id, d + 1);
    const double label = group[d] < m ? 1.0 : 0.0;
    const double dominant = group[d] == 0 ? 1.0 : 0.0;
    doc.relevance_features.resize(cfg.rel_dim);
    for (std::size_t r = 0; r < cfg.rel_dim; ++r) {
      const double a = static_cast<double>(r + 1) / r_dim;
      double v = a * label + (1.0 - a) * unit(rng);
      if (r == 0) v = (1.0 - cfg.popularity_bias) * v + cfg.popularity_bias * dominant;
      doc.relevance_features[r] = clamp01(v + noise());
    }
    q.docs.push_back(std::move(doc));
  }

  const std::size_t f_dim = cfg.num_channels;
  q.pairwise = PairwiseTensor(n, f_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double cross = group[i] != group[j] ? 1.0 : 0.0;
      for (std::size_t f = 0; f < f_dim; ++f) {
        const double s = cfg.signal * static_cast<double>(f_dim - f) / static_cast<double>(f_dim);
        q.pairwise.set(i, j, f, clamp01(s * cross + (1.0 - s) * unit(rng) + noise()));
      }
    }
  }
  sparsify_and_normalize(q.pairwise, 100);
  return q;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_queries < 1 || num_docs < 1 || num_subtopics < 1 || rel_dim < 1 ||
      num_channels < 1) {
    throw InvalidArgument("synthetic counts must be at least 1");
  }
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be non-negative");
  if (!in01(signal)) throw InvalidArgument("signal must lie in [0,1]");
  if (!in01(redundancy)) throw InvalidArgument("redundancy must lie in [0,1]");
  if (!in01(irrelevant_rate)) throw InvalidArgument("irrelevant rate must lie in [0,1]");
  if (!in01(popularity_bias)) throw InvalidArgument("popularity bias must lie in [0,1]");
  if (!in01(train_fraction) || !in01(val_fraction) || train_fraction + val_fraction > 1.0) {
    throw InvalidArgument("split fractions must lie in [0,1] and sum to at most 1");
  }
}

Dataset generate(const SynthConfig& config) {
  config.validate();
  Dataset ds;
  ds.manifest.rel_dim = config.rel_dim;
  ds.manifest.channels = synth_channel_names(config.num_channels);
  const auto total = static_cast<double>(config.num_queries);
  const auto n_train = static_cast<std::size_t>(std::llround(config.train_fraction * total));
  const auto n_val = static_cast<std::size_t>(std::llround(config.val_fraction * total));
  for (std::size_t qi = 0; qi < config.num_queries; ++qi) {
    ds.queries.push_back(make_query(config, qi));
    ds.splits.emplace_back(qi < n_train ? "train" : qi < n_train + n_val ? "val" : "test");
  }
  return ds;
}

WeightVector oracle_weights(const SynthConfig& config) {
  WeightVector w = WeightVector::zeros(config.rel_dim, config.num_channels);
  w.w_rel.back() = static_cast<double>(config.num_docs) + 1.0;
  w.w_div.front() = 1.0;
  return w;
}

std::vector<std::size_t> latent_groups(const QueryInstance& q) {
  const auto& j = q.judgments;
  std::vector<std::size_t> group(q.num_docs());
  for (DocIndex d = 0; d < q.num_docs(); ++d) {
    group[d] = j.num_subtopics + d;
    for (std::size_t s = 0; s < j.num_subtopics; ++s) {
      if (j.relevant(s, d)) {
        group[d] = s;
        break;
      }
    }
  }
  return group;
}

}  // namespace divrank
