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

#include "divrank/greedy.hpp"

#include <fmt/format.h>

#include "divrank/error.hpp"
#include "divrank/metrics.hpp"

namespace divrank {
namespace {

class OracleAdapter {
 public:
  explicit OracleAdapter(const GainOracle& gain) : gain_(gain) {}
  double gain(DocIndex d) const { return gain_(prefix_, d); }
  void commit(DocIndex d) { prefix_.push_back(d); }

 private:
  const GainOracle& gain_;
  Ranking prefix_;
};

class CascadeGain {
 public:
  CascadeGain(const SubtopicJudgments& j, const MeasureParams& p) : state_(j, p) {}
  double gain(DocIndex d) const { return state_.marginal_gain(d); }
  void commit(DocIndex d) { state_.append(d); }

 private:
  CascadeState state_;
};

void visit_tuples(std::size_t n, std::size_t k, Ranking& prefix, std::vector<bool>& used,
                  const std::function<void(std::span<const DocIndex>)>& visit) {
  if (prefix.size() == k) {
    visit(prefix);
    return;
  }
  for (DocIndex d = 0; d < n; ++d) {
    if (used[d]) continue;
    used[d] = true;
    prefix.push_back(d);
    visit_tuples(n, k, prefix, used, visit);
    prefix.pop_back();
    used[d] = false;
  }
}

}  // namespace

Ranking greedy_select(std::size_t n, std::size_t k, const GainOracle& gain) {
  OracleAdapter model(gain);
  return greedy_select(n, k, model);
}

Ranking build_target(const QueryInstance& q, const MeasureParams& p) {
  p.validate();
  if (!q.judgments.any_relevant()) {
    throw DegenerateQuery(fmt::format("query {} has no relevant documents", q.query_id));
  }
  CascadeGain model(q.judgments, p);
  return greedy_select(q.num_docs(), p.cutoff, model);
}

void for_each_ordered_tuple(std::size_t n, std::size_t k,
                            const std::function<void(std::span<const DocIndex>)>& visit) {
  Ranking prefix;
  std::vector<bool> used(n, false);
  visit_tuples(n, std::min(k, n), prefix, used, visit);
}

Ranking exhaustive_best(const QueryInstance& q, const MeasureParams& p, std::size_t k) {
  const std::size_t n = q.num_docs();
  if (n > 10 || k > 5) {
    throw SizeGuard(fmt::format("exhaustive search limited to n<=10, k<=5 (got n={}, k={})",
                                n, k));
  }
  MeasureParams params = p;
  params.cutoff = std::max<std::size_t>(params.cutoff, k);
  Ranking best;
  double best_score = -1.0;
  for_each_ordered_tuple(n, k, [&](std::span<const DocIndex> tuple) {
    const double s = raw_dcem(tuple, q.judgments, params);
    if (s > best_score) {
      best_score = s;
      best.assign(tuple.begin(), tuple.end());
    }
  });
  return best;
}

}  // namespace divrank
