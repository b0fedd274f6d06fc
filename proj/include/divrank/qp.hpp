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
// Restricted n-slack structural SVM quadratic program
//
//   min_{w, xi >= 0}  1/2 |w|^2 + (C/n) sum_i xi_i
//   s.t.  w . delta_c >= loss_c - xi_{ex(c)}   for every working constraint c
//
// solved in the dual
//
//   max_{alpha >= 0}  sum_c alpha_c loss_c - 1/2 |sum_c alpha_c delta_c|^2
//   s.t.  sum_{c in W_i} alpha_c <= C/n   for every example i
//
// with w = sum_c alpha_c delta_c. Each example's budget constraint is turned
// into an equality by a slack multiplier with zero loss and zero direction,
// after which the solver repeatedly picks the example with the largest KKT
// violation and moves mass between its most and least attractive variables
// (SMO-style pairwise coordinate ascent). The Gram matrix is cached and
// multipliers are kept between solves, so re-solving after adding a
// constraint is warm-started.
//
// The Gram matrix has rank at most dim, and with many constraints and a
// large C the pair steps can stall. After a step budget the solver then runs
// a primal-dual interior-point method on the primal (dim + n variables,
// Newton steps through a dim x dim Schur complement, in long double) once.
// Its multipliers are rounded to a complementary active set; the rounded
// point, then the raw interior-point point, is accepted if its duality gap is
// within tolerance, and otherwise pair steps continue from the rounded point.
//

#ifndef DIVRANK_QP_HPP_
#define DIVRANK_QP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace divrank {

struct QpConstraint {
  std::size_t example = 0;
  std::vector<double> delta;  // Psi(x_i, y_i) - Psi(x_i, y_hat)
  double loss = 0.0;
};

struct QpSolution {
  std::vector<double> w;
  std::vector<double> xi;     // one per example
  std::vector<double> alpha;  // one per constraint, in constraint order
  double primal = 0.0;
  double dual = 0.0;
  double kkt_violation = 0.0;
  std::size_t iterations = 0;
  bool used_fallback = false;
};

struct QpOptions {
  double c = 1.0;
  double tol = 1e-8;
  std::size_t max_iters = 5'000'000;
  // Pair steps per solve before switching to the interior-point fallback;
  // 0 picks 50 * constraints + 2000.
  std::size_t smo_budget = 0;
  bool interior_point_fallback = true;
};

class RestrictedQp {
 public:
  RestrictedQp(std::size_t dim, std::size_t num_examples);

  std::size_t dim() const { return dim_; }
  std::size_t num_examples() const { return num_examples_; }
  std::size_t size() const { return constraints_.size(); }

  // Returns a stable id for the new constraint (its multiplier starts at 0).
  std::uint64_t add(std::size_t example, std::vector<double> delta, double loss);
  void remove(std::uint64_t id);

  const QpConstraint& constraint(std::uint64_t id) const;
  double alpha(std::uint64_t id) const;
  // Ids of live constraints in insertion order.
  std::vector<std::uint64_t> ids() const;

  // Solves to max KKT violation < tol and duality gap <= tol * (1 + |primal|).
  // Throws QpNotConverged after max_iters pair updates.
  QpSolution solve(const QpOptions& options);

 private:
  std::size_t index_of(std::uint64_t id) const;
  void recompute_gradient();
  // Overwrites alpha_ and slack_ with interior-point multipliers.
  // Leaves the rounded multipliers in alpha_/slack_ and returns the raw
  // interior multipliers scaled back into each block's budget.
  std::vector<double> interior_point(double budget,
                                     const std::vector<std::vector<std::size_t>>& blocks);

  std::size_t dim_;
  std::size_t num_examples_;
  std::vector<QpConstraint> constraints_;
  std::vector<std::uint64_t> ids_;
  std::vector<double> alpha_;
  std::vector<std::vector<double>> gram_;
  std::vector<double> grad_;  // loss_c - w . delta_c
  std::vector<double> slack_;
  double budget_ = -1.0;  // C/n used for the current multipliers
  std::uint64_t next_id_ = 0;
};

// One-shot solve from zero multipliers.
QpSolution solve_restricted_qp(std::span<const QpConstraint> constraints, std::size_t dim,
                               std::size_t num_examples, const QpOptions& options);

// Primal value 1/2|w|^2 + (C/n) sum xi with xi_i = max(0, max_c loss_c - w.delta_c).
double qp_primal(std::span<const QpConstraint> constraints, std::span<const double> w,
                 std::size_t num_examples, double c, std::vector<double>* xi_out = nullptr);

}  // namespace divrank

#endif  // DIVRANK_QP_HPP_
