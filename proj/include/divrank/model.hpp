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
// Linear bi-criteria ranking model.
//
// The joint feature map of a ranking is the sum of its documents' relevance
// vectors concatenated with the sum of the pairwise diversity vectors over
// its unordered pairs. It does not depend on positions; order enters only
// through the loss and through the greedy selection sequence.
//

#ifndef DIVRANK_MODEL_HPP_
#define DIVRANK_MODEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "divrank/core.hpp"

namespace divrank {

struct JointFeature {
  std::vector<double> phi_rel;
  std::vector<double> phi_div;

  std::vector<double> flat() const;
};

std::size_t relevance_dim(const QueryInstance& q);

// Incrementally maintained joint feature of a growing ranking.
class JointFeatureAccumulator {
 public:
  explicit JointFeatureAccumulator(const QueryInstance& q);
  void add(DocIndex d);
  const JointFeature& feature() const { return feature_; }
  const Ranking& ranking() const { return ranking_; }

 private:
  const QueryInstance* q_;
  JointFeature feature_;
  Ranking ranking_;
};

JointFeature joint_feature_map(const QueryInstance& q, std::span<const DocIndex> ranking);

// w_rel . phi_rel + w_div . phi_div. Throws InvalidArgument on a dimension
// mismatch.
double discriminant(const WeightVector& w, const QueryInstance& q,
                    std::span<const DocIndex> ranking);
double discriminant(const WeightVector& w, const JointFeature& phi);

void check_dimensions(const WeightVector& w, const QueryInstance& q);

// Greedy argmax of the discriminant: at each step the candidate with the
// largest w_rel . psi_r(d) + sum_{u in prefix} w_div . psi_d(u, d).
Ranking predict(const WeightVector& w, const QueryInstance& q, std::size_t k);

// Same greedy, scoring each candidate by its marginal discriminant gain plus
// loss_weight times its marginal loss gain -gain_DCEM(prefix, d) / ideal,
// where ideal is the raw score of target. Throws DegenerateQuery when the
// target scores zero.
Ranking loss_augmented_infer(const WeightVector& w, const QueryInstance& q,
                             std::span<const DocIndex> target, const MeasureParams& p,
                             std::size_t k, double loss_weight = 1.0);

}  // namespace divrank

#endif  // DIVRANK_MODEL_HPP_
