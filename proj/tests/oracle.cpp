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

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

double cascade_score(const std::vector<std::size_t>& ranking, const Judged& j, Kind kind,
                     double alpha, double beta) {
  double total = 0.0;
  for (std::size_t i = 0; i < j.probs.size(); ++i) {
    double per_subtopic = 0.0;
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
      const int g = j.rel[i][ranking[pos]];
      if (g == 0) continue;
      int before = 0;
      for (std::size_t q = 0; q < pos; ++q) before += j.rel[i][ranking[q]];
      const double k = static_cast<double>(pos + 1);
      double weight = 0.0;
      switch (kind) {
        case Kind::kAlphaNdcg:
          weight = 1.0 / std::log2(k + 1.0);
          break;
        case Kind::kErrIa:
          weight = 1.0 / k;
          break;
        case Kind::kNrbp:
          weight = 1.0 / std::pow(1.0 / beta, k - 1.0);
          break;
      }
      per_subtopic += g * std::pow(1.0 - alpha, before) * weight;
    }
    total += j.probs[i] * per_subtopic;
  }
  return total;
}

double best_cascade_score(std::size_t n, std::size_t k, const Judged& j, Kind kind,
                          double alpha, double beta) {
  k = std::min(k, n);
  double best = 0.0;
  // Every k-subset via a selection mask, then every order of it.
  std::vector<int> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), 1);
  do {
    std::vector<std::size_t> chosen;
    for (std::size_t d = 0; d < n; ++d) {
      if (mask[d] != 0) chosen.push_back(d);
    }
    std::sort(chosen.begin(), chosen.end());
    do {
      best = std::max(best, cascade_score(chosen, j, kind, alpha, beta));
    } while (std::next_permutation(chosen.begin(), chosen.end()));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

std::vector<std::size_t> sort_by_score(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

std::vector<std::size_t> mmr(const std::vector<double>& scores,
                             const std::vector<std::vector<double>>& sim, double lambda,
                             std::size_t k) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> out;
  std::vector<bool> used(n, false);
  while (out.size() < std::min(k, n)) {
    std::size_t pick = n;
    double pick_value = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      if (used[d]) continue;
      double value = scores[d];
      if (!out.empty()) {
        double max_sim = 0.0;
        for (std::size_t s : out) max_sim = std::max(max_sim, sim[d][s]);
        value = lambda * scores[d] - (1.0 - lambda) * max_sim;
      }
      if (pick == n || value > pick_value) {
        pick = d;
        pick_value = value;
      }
    }
    used[pick] = true;
    out.push_back(pick);
  }
  return out;
}

double bicriteria_score(const std::vector<std::size_t>& ranking,
                        const std::vector<std::vector<double>>& rel_features,
                        const std::vector<std::vector<std::vector<double>>>& pair_features,
                        const std::vector<double>& w_rel, const std::vector<double>& w_div) {
  double total = 0.0;
  for (std::size_t a = 0; a < ranking.size(); ++a) {
    for (std::size_t r = 0; r < w_rel.size(); ++r) total += w_rel[r] * rel_features[ranking[a]][r];
    for (std::size_t b = a + 1; b < ranking.size(); ++b) {
      for (std::size_t f = 0; f < w_div.size(); ++f) {
        total += w_div[f] * pair_features[ranking[a]][ranking[b]][f];
      }
    }
  }
  return total;
}

Judged judged_from(const divrank::SubtopicJudgments& j) {
  Judged out;
  out.probs = j.probs;
  out.rel.assign(j.num_subtopics, std::vector<int>(j.num_docs, 0));
  for (std::size_t i = 0; i < j.num_subtopics; ++i) {
    for (std::size_t d = 0; d < j.num_docs; ++d) out.rel[i][d] = j.rel[i * j.num_docs + d];
  }
  return out;
}

Kind kind_from(divrank::Measure m) {
  switch (m) {
    case divrank::Measure::kAlphaNdcg:
      return Kind::kAlphaNdcg;
    case divrank::Measure::kErrIa:
      return Kind::kErrIa;
    case divrank::Measure::kNrbp:
      return Kind::kNrbp;
  }
  return Kind::kErrIa;
}

divrank::QueryInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                       std::size_t rel_dim, std::size_t channels,
                                       double relevance_rate, bool uniform_probs) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  divrank::QueryInstance q;
  q.query_id = "rq";
  for (std::size_t d = 0; d < n; ++d) {
    divrank::DocumentRecord doc;
    doc.doc_id = "d" + std::to_string(d);
    for (std::size_t r = 0; r < rel_dim; ++r) doc.relevance_features.push_back(unit(rng));
    q.docs.push_back(std::move(doc));
  }
  q.pairwise = divrank::PairwiseTensor(n, channels);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t f = 0; f < channels; ++f) q.pairwise.set(i, j, f, unit(rng));
    }
  }
  auto& judg = q.judgments;
  judg.num_subtopics = m;
  judg.num_docs = n;
  judg.rel.assign(m * n, 0);
  for (auto& r : judg.rel) r = unit(rng) < relevance_rate ? 1 : 0;
  judg.probs.assign(m, 1.0 / static_cast<double>(m));
  if (!uniform_probs) {
    double sum = 0.0;
    for (auto& p : judg.probs) {
      p = 0.05 + unit(rng);
      sum += p;
    }
    for (auto& p : judg.probs) p /= sum;
  }
  return q;
}

}  // namespace oracle
