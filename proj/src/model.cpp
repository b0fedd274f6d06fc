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

#include "divrank/model.hpp"

#include <fmt/format.h>

#include "divrank/error.hpp"
#include "divrank/greedy.hpp"
#include "divrank/metrics.hpp"

namespace divrank {
namespace {

// Marginal discriminant gain with the pairwise part accumulated per
// candidate, so each commit costs O(n F).
class DiscriminantGain {
 public:
  DiscriminantGain(const WeightVector& w, const QueryInstance& q)
      : w_(&w), q_(&q), rel_(q.num_docs()), div_(q.num_docs(), 0.0) {
    for (DocIndex d = 0; d < q.num_docs(); ++d) {
      rel_[d] = dot(w.w_rel, q.docs[d].relevance_features);
    }
  }
  double gain(DocIndex d) const { return rel_[d] + div_[d]; }
  void commit(DocIndex u) {
    for (DocIndex d = 0; d < q_->num_docs(); ++d) {
      if (d != u) div_[d] += dot(w_->w_div, q_->pairwise.pair(u, d));
    }
  }

 private:
  const WeightVector* w_;
  const QueryInstance* q_;
  std::vector<double> rel_;
  std::vector<double> div_;
};

class LossAugmentedGain {
 public:
  LossAugmentedGain(const WeightVector& w, const QueryInstance& q, const MeasureParams& p,
                    double ideal, double loss_weight)
      : score_(w, q), cascade_(q.judgments, p), scale_(loss_weight / ideal) {}
  double gain(DocIndex d) const {
    return score_.gain(d) - scale_ * cascade_.marginal_gain(d);
  }
  void commit(DocIndex d) {
    score_.commit(d);
    cascade_.append(d);
  }

 private:
  DiscriminantGain score_;
  CascadeState cascade_;
  double scale_;
};

}  // namespace

std::vector<double> JointFeature::flat() const {
  std::vector<double> out(phi_rel);
  out.insert(out.end(), phi_div.begin(), phi_div.end());
  return out;
}

std::size_t relevance_dim(const QueryInstance& q) {
  return q.docs.empty() ? 0 : q.docs.front().relevance_features.size();
}

JointFeatureAccumulator::JointFeatureAccumulator(const QueryInstance& q) : q_(&q) {
  feature_.phi_rel.assign(relevance_dim(q), 0.0);
  feature_.phi_div.assign(q.pairwise.num_channels(), 0.0);
}

void JointFeatureAccumulator::add(DocIndex d) {
  const auto& rel = q_->docs.at(d).relevance_features;
  for (std::size_t r = 0; r < rel.size(); ++r) feature_.phi_rel[r] += rel[r];
  for (DocIndex u : ranking_) {
    const auto pair = q_->pairwise.pair(u, d);
    for (std::size_t f = 0; f < pair.size(); ++f) feature_.phi_div[f] += pair[f];
  }
  ranking_.push_back(d);
}

JointFeature joint_feature_map(const QueryInstance& q, std::span<const DocIndex> ranking) {
  check_ranking(ranking, q.num_docs(), q.num_docs());
  JointFeatureAccumulator acc(q);
  for (DocIndex d : ranking) acc.add(d);
  return acc.feature();
}

void check_dimensions(const WeightVector& w, const QueryInstance& q) {
  if (w.w_rel.size() != relevance_dim(q) || w.w_div.size() != q.pairwise.num_channels()) {
    throw InvalidArgument(fmt::format(
        "weight dimensions ({}, {}) do not match query {} features ({}, {})", w.w_rel.size(),
        w.w_div.size(), q.query_id, relevance_dim(q), q.pairwise.num_channels()));
  }
}

double discriminant(const WeightVector& w, const JointFeature& phi) {
  if (w.w_rel.size() != phi.phi_rel.size() || w.w_div.size() != phi.phi_div.size()) {
    throw InvalidArgument("weight and joint feature dimensions differ");
  }
  return dot(w.w_rel, phi.phi_rel) + dot(w.w_div, phi.phi_div);
}

double discriminant(const WeightVector& w, const QueryInstance& q,
                    std::span<const DocIndex> ranking) {
  check_dimensions(w, q);
  return discriminant(w, joint_feature_map(q, ranking));
}

Ranking predict(const WeightVector& w, const QueryInstance& q, std::size_t k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  check_dimensions(w, q);
  DiscriminantGain model(w, q);
  return greedy_select(q.num_docs(), k, model);
}

Ranking loss_augmented_infer(const WeightVector& w, const QueryInstance& q,
                             std::span<const DocIndex> target, const MeasureParams& p,
                             std::size_t k, double loss_weight) {
  check_dimensions(w, q);
  MeasureParams params = p;
  params.cutoff = std::max(params.cutoff, std::max(k, target.size()));
  const double ideal = raw_dcem(target, q.judgments, params);
  if (!(ideal > 0.0)) {
    throw DegenerateQuery(fmt::format("query {} target has zero score", q.query_id));
  }
  LossAugmentedGain model(w, q, params, ideal, loss_weight);
  return greedy_select(q.num_docs(), k, model);
}

}  // namespace divrank
