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

#include "divrank/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "divrank/error.hpp"
#include "divrank/greedy.hpp"
#include "divrank/metrics.hpp"
#include "divrank/parallel.hpp"

namespace divrank {
namespace {

std::size_t ranking_length(const TrainingExample& ex, const MeasureParams& p) {
  return std::min(p.cutoff, ex.query->num_docs());
}

std::vector<double> difference(const JointFeature& target, const JointFeature& other) {
  std::vector<double> d = target.flat();
  const std::vector<double> o = other.flat();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] -= o[k];
  return d;
}

// Cutting-plane state shared by the sequential and batched sweeps.
class Trainer {
 public:
  Trainer(std::span<const TrainingExample> examples, const TrainConfig& cfg)
      : examples_(examples),
        cfg_(cfg),
        rel_dim_(relevance_dim(*examples.front().query)),
        div_dim_(examples.front().query->pairwise.num_channels()),
        qp_(rel_dim_ + div_dim_, examples.size()),
        w_(WeightVector::zeros(rel_dim_, div_dim_)) {
    working_.per_example.resize(examples.size());
    for (const auto& ex : examples) check_dimensions(w_, *ex.query);
  }

  TrainResult run(const IterationCallback& on_iteration) {
    TrainResult result;
    bool changed = true;
    std::size_t iter = 0;
    while (changed && iter < cfg_.max_outer_iters) {
      ++iter;
      const std::size_t added = cfg_.sweep_mode == SweepMode::kSequential
                                    ? sequential_sweep(iter)
                                    : batched_sweep(iter);
      changed = added > 0;
      IterationRecord rec;
      rec.iteration = iter;
      rec.objective = objective_;
      rec.constraints = working_.total();
      rec.added = added;
      rec.mean_train_loss = mean_training_loss(w_, examples_, cfg_.measure, cfg_.threads);
      stats_.iterations.push_back(rec);
      if (on_iteration) on_iteration(rec);
    }
    stats_.outer_iterations = iter;
    stats_.final_objective = objective_;
    stats_.truncated = changed;
    result.w = w_;
    result.stats = std::move(stats_);
    result.working_set = std::move(working_);
    return result;
  }

 private:
  // xi_i = max(0, max_{y in W_i} H(y; w)).
  double slack(std::size_t i) const {
    const auto& ex = examples_[i];
    const double target_score = discriminant(w_, ex.target_feature);
    double xi = 0.0;
    for (const auto& con : working_.per_example[i]) {
      xi = std::max(xi, con.loss + discriminant(w_, con.feature) - target_score);
    }
    return xi;
  }

  struct Candidate {
    Ranking ranking;
    JointFeature feature;
    double loss = 0.0;
    double violation = 0.0;
  };

  // The greedy loss-augmented ranking approximates the most violated
  // constraint; the plain prediction is scored as a second candidate, since
  // the greedy can stall on rankings whose loss is high but already covered
  // while the prediction itself still violates.
  Candidate find_violated(std::size_t i) const {
    const auto& ex = examples_[i];
    const std::size_t k = ranking_length(ex, cfg_.measure);
    Candidate best;
    for (const double loss_weight : {1.0, 0.0}) {
      Candidate c;
      c.ranking = loss_augmented_infer(w_, *ex.query, ex.target, cfg_.measure, k, loss_weight);
      c.feature = joint_feature_map(*ex.query, c.ranking);
      c.loss = dcem_loss(ex.ideal_raw, c.ranking, *ex.query, cfg_.measure);
      c.violation =
          c.loss + discriminant(w_, c.feature) - discriminant(w_, ex.target_feature);
      if (best.ranking.empty() || c.violation > best.violation) best = std::move(c);
    }
    return best;
  }

  // Adds the candidate if it violates by more than epsilon; returns true if added.
  bool consider(std::size_t iter, std::size_t i, Candidate c) {
    const double xi = slack(i);
    if (!(c.violation > xi + cfg_.epsilon)) return false;
    if (working_.contains(i, c.ranking)) return false;
    WorkingConstraint con;
    con.qp_id = qp_.add(i, difference(examples_[i].target_feature, c.feature), c.loss);
    con.ranking = std::move(c.ranking);
    con.feature = std::move(c.feature);
    con.loss = c.loss;
    working_.per_example[i].push_back(std::move(con));
    stats_.additions.push_back({iter, i, c.violation, xi});
    ++stats_.constraints_added;
    return true;
  }

  void resolve() {
    QpOptions opt;
    opt.c = cfg_.c;
    opt.tol = cfg_.qp_tol;
    opt.max_iters = cfg_.qp_max_iters;
    const QpSolution sol = qp_.solve(opt);
    w_ = WeightVector::from_flat(sol.w, rel_dim_);
    objective_ = sol.primal;
    prune();
  }

  void prune() {
    for (auto& cons : working_.per_example) {
      for (auto it = cons.begin(); it != cons.end();) {
        if (qp_.alpha(it->qp_id) == 0.0) {
          ++it->zero_streak;
        } else {
          it->zero_streak = 0;
        }
        if (cfg_.prune_after > 0 && it->zero_streak >= cfg_.prune_after) {
          qp_.remove(it->qp_id);
          it = cons.erase(it);
          ++stats_.constraints_pruned;
        } else {
          ++it;
        }
      }
    }
  }

  std::size_t sequential_sweep(std::size_t iter) {
    std::size_t added = 0;
    for (std::size_t i = 0; i < examples_.size(); ++i) {
      if (consider(iter, i, find_violated(i))) {
        ++added;
        resolve();
      }
    }
    return added;
  }

  std::size_t batched_sweep(std::size_t iter) {
    std::vector<Candidate> found(examples_.size());
    parallel_for(examples_.size(), cfg_.threads,
                 [&](std::size_t i) { found[i] = find_violated(i); });
    std::size_t added = 0;
    for (std::size_t i = 0; i < examples_.size(); ++i) {
      if (consider(iter, i, std::move(found[i]))) ++added;
    }
    if (added > 0) resolve();
    return added;
  }

  std::span<const TrainingExample> examples_;
  TrainConfig cfg_;
  std::size_t rel_dim_;
  std::size_t div_dim_;
  RestrictedQp qp_;
  WeightVector w_;
  WorkingSet working_;
  TrainStats stats_;
  double objective_ = 0.0;
};

}  // namespace

std::vector<TrainingExample> make_training_set(std::span<const QueryInstance> queries,
                                               const MeasureParams& p,
                                               std::vector<std::string>* skipped) {
  return make_training_set(queries, {}, p, skipped);
}

std::vector<TrainingExample> make_training_set(std::span<const QueryInstance> queries,
                                               std::span<const Ranking> targets,
                                               const MeasureParams& p,
                                               std::vector<std::string>* skipped) {
  p.validate();
  if (!targets.empty() && targets.size() != queries.size()) {
    throw InvalidArgument(fmt::format("{} targets given for {} queries", targets.size(),
                                      queries.size()));
  }
  std::vector<TrainingExample> out;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const auto& q = queries[qi];
    if (!q.judgments.any_relevant()) {
      if (skipped != nullptr) skipped->push_back(q.query_id);
      continue;
    }
    TrainingExample ex;
    ex.query = &q;
    ex.target = (targets.empty() || targets[qi].empty()) ? build_target(q, p) : targets[qi];
    ex.ideal_raw = raw_dcem(ex.target, q.judgments, p);
    if (!(ex.ideal_raw > 0.0)) {
      if (skipped != nullptr) skipped->push_back(q.query_id);
      continue;
    }
    ex.target_feature = joint_feature_map(q, ex.target);
    out.push_back(std::move(ex));
  }
  return out;
}

double hinge(const WeightVector& w, const TrainingExample& example,
             std::span<const DocIndex> y, const MeasureParams& p) {
  const auto& q = *example.query;
  return dcem_loss(example.ideal_raw, y, q, p) + discriminant(w, q, y) -
         discriminant(w, example.target_feature);
}

void TrainConfig::validate() const {
  if (!(c > 0.0)) throw InvalidArgument("C must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (max_outer_iters == 0) throw InvalidArgument("max_outer_iters must be positive");
  if (!(qp_tol > 0.0)) throw InvalidArgument("QP tolerance must be positive");
  if (threads == 0) throw InvalidArgument("threads must be positive");
  measure.validate();
}

std::size_t WorkingSet::total() const {
  std::size_t n = 0;
  for (const auto& cons : per_example) n += cons.size();
  return n;
}

bool WorkingSet::contains(std::size_t example, std::span<const DocIndex> ranking) const {
  for (const auto& con : per_example.at(example)) {
    if (std::equal(con.ranking.begin(), con.ranking.end(), ranking.begin(), ranking.end())) {
      return true;
    }
  }
  return false;
}

TrainResult cutting_plane_train(std::span<const TrainingExample> examples,
                                const TrainConfig& cfg, const IterationCallback& on_iteration) {
  cfg.validate();
  if (examples.empty()) throw InvalidArgument("no training examples");
  Trainer trainer(examples, cfg);
  return trainer.run(on_iteration);
}

double mean_training_loss(const WeightVector& w, std::span<const TrainingExample> examples,
                          const MeasureParams& p, std::size_t threads) {
  if (examples.empty()) return 0.0;
  std::vector<double> loss(examples.size());
  parallel_for(examples.size(), threads, [&](std::size_t i) {
    const auto& ex = examples[i];
    const Ranking y = predict(w, *ex.query, ranking_length(ex, p));
    loss[i] = dcem_loss(ex.ideal_raw, y, *ex.query, p);
  });
  double sum = 0.0;
  for (double l : loss) sum += l;
  return sum / static_cast<double>(examples.size());
}

double mean_dcem(const WeightVector& w, std::span<const QueryInstance> queries,
                 const MeasureParams& p, std::size_t threads) {
  std::vector<double> score(queries.size(), 0.0);
  std::vector<char> used(queries.size(), 0);
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    const auto& q = queries[i];
    if (!q.judgments.any_relevant()) return;
    const Ranking y = predict(w, q, std::min(p.cutoff, q.num_docs()));
    score[i] = dcem(y, q, p);
    used[i] = 1;
  });
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (used[i] == 0) continue;
    sum += score[i];
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int e = -4; e <= 3; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

SweepResult c_sweep(std::span<const TrainingExample> train,
                    std::span<const QueryInstance> validation, std::span<const double> grid,
                    const TrainConfig& cfg) {
  if (grid.empty()) throw InvalidArgument("C grid is empty");
  SweepResult out;
  for (double c : grid) {
    TrainConfig run_cfg = cfg;
    run_cfg.c = c;
    TrainResult trained = cutting_plane_train(train, run_cfg);
    SweepRow row;
    row.c = c;
    row.train_loss = mean_training_loss(trained.w, train, cfg.measure, cfg.threads);
    row.validation_dcem = mean_dcem(trained.w, validation, cfg.measure, cfg.threads);
    row.stats = std::move(trained.stats);
    row.w = std::move(trained.w);
    out.rows.push_back(std::move(row));
  }
  for (std::size_t r = 1; r < out.rows.size(); ++r) {
    if (out.rows[r].validation_dcem > out.rows[out.best].validation_dcem) out.best = r;
  }
  return out;
}

}  // namespace divrank
