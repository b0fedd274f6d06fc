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
// Structural max-margin training by cutting planes.
//
// For each example the trainer finds a (greedily) most violated ranking,
// adds it to that example's working set when its hinge value exceeds the
// current slack by more than epsilon, and re-solves the restricted QP. It
// stops after a full pass over the examples adds nothing.
//

#ifndef DIVRANK_TRAINER_HPP_
#define DIVRANK_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divrank/core.hpp"
#include "divrank/model.hpp"
#include "divrank/qp.hpp"

namespace divrank {

struct TrainingExample {
  const QueryInstance* query = nullptr;
  Ranking target;
  double ideal_raw = 0.0;      // raw DCEM of target
  JointFeature target_feature;
};

// Builds one example per non-degenerate query; ids of skipped queries are
// appended to skipped when given. Targets default to build_target().
std::vector<TrainingExample> make_training_set(std::span<const QueryInstance> queries,
                                               const MeasureParams& p,
                                               std::vector<std::string>* skipped = nullptr);

// Same with caller-provided targets (one per query, empty = build it).
std::vector<TrainingExample> make_training_set(std::span<const QueryInstance> queries,
                                               std::span<const Ranking> targets,
                                               const MeasureParams& p,
                                               std::vector<std::string>* skipped = nullptr);

// Delta(y_i, y) + w.Psi(x_i, y) - w.Psi(x_i, y_i).
double hinge(const WeightVector& w, const TrainingExample& example,
             std::span<const DocIndex> y, const MeasureParams& p);

enum class SweepMode {
  // Re-solve after every added constraint, examples in order.
  kSequential,
  // Find violated constraints for all examples with the sweep's weights
  // (in parallel), then add them and re-solve once.
  kBatched,
};

struct TrainConfig {
  double c = 1.0;
  double epsilon = 1e-3;
  std::size_t max_outer_iters = 200;
  double qp_tol = 1e-8;
  std::size_t qp_max_iters = 5'000'000;
  MeasureParams measure;
  // Constraints whose multiplier stayed zero for this many consecutive
  // re-solves are dropped.
  std::size_t prune_after = 50;
  SweepMode sweep_mode = SweepMode::kSequential;
  std::size_t threads = 1;

  void validate() const;
};

struct WorkingConstraint {
  Ranking ranking;
  JointFeature feature;  // Psi(x_i, ranking)
  double loss = 0.0;     // Delta(y_i, ranking)
  std::uint64_t qp_id = 0;
  std::size_t zero_streak = 0;
};

struct WorkingSet {
  std::vector<std::vector<WorkingConstraint>> per_example;

  std::size_t total() const;
  bool contains(std::size_t example, std::span<const DocIndex> ranking) const;
};

struct AddEvent {
  std::size_t outer_iter = 0;
  std::size_t example = 0;
  double violation = 0.0;  // H(y_hat; w) when added
  double slack = 0.0;      // xi_i at that moment
};

struct IterationRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  std::size_t constraints = 0;
  std::size_t added = 0;
  double mean_train_loss = 0.0;
};

struct TrainStats {
  std::size_t constraints_added = 0;
  std::size_t constraints_pruned = 0;
  std::size_t outer_iterations = 0;
  double final_objective = 0.0;
  bool truncated = false;
  std::vector<IterationRecord> iterations;
  std::vector<AddEvent> additions;
};

struct TrainResult {
  WeightVector w;
  TrainStats stats;
  WorkingSet working_set;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

TrainResult cutting_plane_train(std::span<const TrainingExample> examples,
                                const TrainConfig& cfg,
                                const IterationCallback& on_iteration = {});

// Mean Delta of predict(w) over the examples.
double mean_training_loss(const WeightVector& w, std::span<const TrainingExample> examples,
                          const MeasureParams& p, std::size_t threads = 1);

// Mean normalized DCEM of predict(w) over non-degenerate queries.
double mean_dcem(const WeightVector& w, std::span<const QueryInstance> queries,
                 const MeasureParams& p, std::size_t threads = 1);

struct SweepRow {
  double c = 0.0;
  double train_loss = 0.0;
  double validation_dcem = 0.0;
  TrainStats stats;
  WeightVector w;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t best = 0;  // row with the highest validation DCEM (first on ties)
};

// 10^-4, 10^-3, ..., 10^3.
std::vector<double> default_c_grid();

SweepResult c_sweep(std::span<const TrainingExample> train,
                    std::span<const QueryInstance> validation, std::span<const double> grid,
                    const TrainConfig& cfg);

}  // namespace divrank

#endif  // DIVRANK_TRAINER_HPP_
