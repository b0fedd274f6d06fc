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

#include "divrank/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "divrank/core.hpp"
#include "divrank/error.hpp"

namespace divrank {
namespace {

constexpr std::size_t kSlack = std::numeric_limits<std::size_t>::max();

}  // namespace

RestrictedQp::RestrictedQp(std::size_t dim, std::size_t num_examples)
    : dim_(dim), num_examples_(num_examples), slack_(num_examples, 0.0) {
  if (num_examples == 0) throw InvalidArgument("QP needs at least one example");
}

std::uint64_t RestrictedQp::add(std::size_t example, std::vector<double> delta,
                                double loss) {
  if (example >= num_examples_) {
    throw InvalidArgument(fmt::format("example {} out of range", example));
  }
  if (delta.size() != dim_) {
    throw InvalidArgument(
        fmt::format("constraint dimension {} does not match {}", delta.size(), dim_));
  }
  std::vector<double> row(constraints_.size() + 1);
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    row[c] = dot(constraints_[c].delta, delta);
    gram_[c].push_back(row[c]);
  }
  row.back() = dot(delta, delta);
  gram_.push_back(std::move(row));
  constraints_.push_back({example, std::move(delta), loss});
  alpha_.push_back(0.0);
  grad_.push_back(0.0);
  ids_.push_back(next_id_);
  return next_id_++;
}

std::size_t RestrictedQp::index_of(std::uint64_t id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    throw InvalidArgument(fmt::format("unknown constraint id {}", id));
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

void RestrictedQp::remove(std::uint64_t id) {
  const std::size_t idx = index_of(id);
  if (budget_ >= 0.0) slack_[constraints_[idx].example] += alpha_[idx];
  const auto off = static_cast<std::ptrdiff_t>(idx);
  constraints_.erase(constraints_.begin() + off);
  alpha_.erase(alpha_.begin() + off);
  grad_.erase(grad_.begin() + off);
  ids_.erase(ids_.begin() + off);
  gram_.erase(gram_.begin() + off);
  for (auto& row : gram_) row.erase(row.begin() + off);
}

const QpConstraint& RestrictedQp::constraint(std::uint64_t id) const {
  return constraints_[index_of(id)];
}

double RestrictedQp::alpha(std::uint64_t id) const { return alpha_[index_of(id)]; }

std::vector<std::uint64_t> RestrictedQp::ids() const { return ids_; }

void RestrictedQp::recompute_gradient() {
  const std::size_t n = constraints_.size();
  std::vector<double> w(dim_, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    if (alpha_[c] == 0.0) continue;
    for (std::size_t k = 0; k < dim_; ++k) w[k] += alpha_[c] * constraints_[c].delta[k];
  }
  for (std::size_t c = 0; c < n; ++c) grad_[c] = constraints_[c].loss - dot(w, constraints_[c].delta);
}

QpSolution RestrictedQp::solve(const QpOptions& options) {
  if (!(options.c > 0.0)) throw InvalidArgument("C must be positive");
  if (!(options.tol > 0.0)) throw InvalidArgument("QP tolerance must be positive");
  const double budget = options.c / static_cast<double>(num_examples_);
  const std::size_t n = constraints_.size();

  // Keep multipliers feasible under a changed budget by rescaling them.
  if (budget_ < 0.0) {
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    std::fill(slack_.begin(), slack_.end(), budget);
  } else if (budget_ != budget) {
    const double scale = budget / budget_;
    for (double& a : alpha_) a *= scale;
    for (double& s : slack_) s *= scale;
  }
  budget_ = budget;

  std::vector<std::vector<std::size_t>> blocks(num_examples_);
  for (std::size_t c = 0; c < n; ++c) blocks[constraints_[c].example].push_back(c);
  for (std::size_t i = 0; i < num_examples_; ++i) {
    double used = 0.0;
    for (std::size_t c : blocks[i]) used += alpha_[c];
    slack_[i] = std::max(0.0, budget - used);
  }
  recompute_gradient();

  QpSolution sol;
  double target_violation = options.tol;
  std::size_t iter = 0;
  const std::size_t smo_budget =
      options.smo_budget > 0 ? options.smo_budget : 50 * n + 2000;
  bool fallback_done = false;
  auto max_violation = [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i < num_examples_; ++i) {
      double up_g = 0.0;
      double down_g = slack_[i] > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      for (std::size_t c : blocks[i]) {
        up_g = std::max(up_g, grad_[c]);
        if (alpha_[c] > 0.0) down_g = std::min(down_g, grad_[c]);
      }
      if (!blocks[i].empty()) worst = std::max(worst, up_g - down_g);
    }
    return worst;
  };
  // Fills sol from the current multipliers; true when the duality gap is
  // within tolerance.
  auto certify = [&](double worst) {
    sol.w.assign(dim_, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      if (alpha_[c] == 0.0) continue;
      for (std::size_t k = 0; k < dim_; ++k) sol.w[k] += alpha_[c] * constraints_[c].delta[k];
    }
    sol.primal = qp_primal(constraints_, sol.w, num_examples_, options.c, &sol.xi);
    double lin = 0.0;
    for (std::size_t c = 0; c < n; ++c) lin += alpha_[c] * constraints_[c].loss;
    sol.dual = lin - 0.5 * dot(sol.w, sol.w);
    sol.kkt_violation = worst;
    return sol.primal - sol.dual <= options.tol * (1.0 + std::abs(sol.primal));
  };
  while (true) {
    // Block with the largest KKT violation (first-order test), then, inside
    // it, the partner of the most attractive variable that gives the largest
    // guaranteed dual increase (second-order choice).
    std::size_t worst_block = 0;
    std::size_t best_up = kSlack;
    double worst = 0.0;
    for (std::size_t i = 0; i < num_examples_; ++i) {
      if (blocks[i].empty()) continue;
      std::size_t up = kSlack;
      double up_g = 0.0;
      double down_g = slack_[i] > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      for (std::size_t c : blocks[i]) {
        if (grad_[c] > up_g) {
          up_g = grad_[c];
          up = c;
        }
        if (alpha_[c] > 0.0 && grad_[c] < down_g) down_g = grad_[c];
      }
      const double violation = up_g - down_g;
      if (violation > worst) {
        worst = violation;
        worst_block = i;
        best_up = up;
      }
    }
    std::size_t best_down = kSlack;
    if (worst > 0.0) {
      const double g_up = best_up == kSlack ? 0.0 : grad_[best_up];
      const double k_uu = best_up == kSlack ? 0.0 : gram_[best_up][best_up];
      double best_score = -1.0;
      auto consider = [&](std::size_t d, double g_d, double k_dd, double k_ud) {
        const double diff = g_up - g_d;
        if (!(diff > 0.0)) return;
        const double curv = std::max(k_uu + k_dd - 2.0 * k_ud, 1e-12);
        const double score = diff * diff / curv;
        if (score > best_score) {
          best_score = score;
          best_down = d;
        }
      };
      if (best_up != kSlack && slack_[worst_block] > 0.0) consider(kSlack, 0.0, 0.0, 0.0);
      for (std::size_t c : blocks[worst_block]) {
        if (c == best_up || !(alpha_[c] > 0.0)) continue;
        consider(c, grad_[c], gram_[c][c], best_up == kSlack ? 0.0 : gram_[best_up][c]);
      }
      if (best_score < 0.0) worst = 0.0;
    }

    if (worst < target_violation) {
      if (certify(worst) || target_violation < 1e-15) break;
      target_violation *= 0.1;
      continue;
    }
    if (options.interior_point_fallback && !fallback_done && iter >= smo_budget) {
      // Candidates: the current point, the interior solution rounded to an
      // active set, and the raw interior multipliers. A bounded duality gap
      // certifies any of them; otherwise pair steps continue from the
      // rounded one.
      fallback_done = true;
      if (certify(worst)) break;
      const auto raw = interior_point(budget, blocks);
      const auto rounded = alpha_;
      const auto rounded_slack = slack_;
      recompute_gradient();
      if (certify(max_violation())) {
        sol.used_fallback = true;
        break;
      }
      alpha_ = raw;
      for (std::size_t i = 0; i < num_examples_; ++i) {
        double used = 0.0;
        for (std::size_t c : blocks[i]) used += alpha_[c];
        slack_[i] = std::max(0.0, budget - used);
      }
      recompute_gradient();
      if (certify(max_violation())) {
        sol.used_fallback = true;
        break;
      }
      alpha_ = rounded;
      slack_ = rounded_slack;
      recompute_gradient();
      sol.used_fallback = true;
      continue;
    }
    if (iter >= options.max_iters) {
      throw QpNotConverged(
          fmt::format("QP did not converge in {} iterations (KKT violation {:.3e})", iter,
                      worst),
          worst);
    }
    ++iter;

    const std::size_t up = best_up;
    const std::size_t down = best_down;
    const double g_up = up == kSlack ? 0.0 : grad_[up];
    const double g_down = down == kSlack ? 0.0 : grad_[down];
    const double k_uu = up == kSlack ? 0.0 : gram_[up][up];
    const double k_dd = down == kSlack ? 0.0 : gram_[down][down];
    const double k_ud = (up == kSlack || down == kSlack) ? 0.0 : gram_[up][down];
    const double curvature = k_uu + k_dd - 2.0 * k_ud;
    double& a_down = down == kSlack ? slack_[worst_block] : alpha_[down];
    double t = curvature > 1e-300 ? (g_up - g_down) / curvature
                                  : std::numeric_limits<double>::infinity();
    bool exhausted = false;
    if (t >= a_down) {
      t = a_down;
      exhausted = true;
    }
    if (up == kSlack) {
      slack_[worst_block] += t;
    } else {
      alpha_[up] += t;
    }
    a_down = exhausted ? 0.0 : a_down - t;

    for (std::size_t c = 0; c < n; ++c) {
      double change = 0.0;
      if (up != kSlack) change += gram_[c][up];
      if (down != kSlack) change -= gram_[c][down];
      grad_[c] -= t * change;
    }
  }
  sol.alpha = alpha_;
  sol.iterations = iter;
  return sol;
}

std::vector<double> RestrictedQp::interior_point(
    double budget, const std::vector<std::vector<std::size_t>>& blocks) {
  // min 1/2|w|^2 + budget * sum xi  s.t.  D w + E xi - loss = s >= 0, xi >= 0.
  // Multipliers: a for the constraint rows, nu for xi >= 0. Near the optimum
  // the Newton systems lose digits to cancellation, so the whole iteration
  // runs in extended precision.
  using Wide = long double;
  using Vec = std::vector<Wide>;
  const std::size_t n = constraints_.size();
  const std::size_t m = num_examples_;
  const std::size_t d = dim_;
  const Wide cap = budget;
  auto row_dot = [&](std::size_t c, const Vec& v) {
    Wide sum = 0;
    for (std::size_t k = 0; k < d; ++k) sum += constraints_[c].delta[k] * v[k];
    return sum;
  };

  Vec w(d, 0), xi(m, 1), nu(m, 1), s(n, 1), a(n, 1);
  // Start with the budget split evenly over each block and its nu.
  for (std::size_t i = 0; i < m; ++i) {
    const Wide share = cap / static_cast<Wide>(blocks[i].size() + 1);
    nu[i] = share;
    for (std::size_t c : blocks[i]) a[c] = share;
  }
  for (std::size_t c = 0; c < n; ++c) {
    s[c] = std::max<Wide>(1, 1 - static_cast<Wide>(constraints_[c].loss));
  }
  Vec r_w(d), r_xi(m), r_s(n), r_a(n), r_nu(m);
  Vec dw(d), dxi(m), dnu(m), ds(n), da(n);
  Vec schur(d * d), rhs(d), h(m), rhs_xi(m);
  std::vector<Vec> mvec(m, Vec(d));

  auto residuals = [&] {
    for (std::size_t k = 0; k < d; ++k) r_w[k] = w[k];
    for (std::size_t i = 0; i < m; ++i) r_xi[i] = cap - nu[i];
    for (std::size_t c = 0; c < n; ++c) {
      const auto& con = constraints_[c];
      for (std::size_t k = 0; k < d; ++k) r_w[k] -= a[c] * con.delta[k];
      r_xi[con.example] -= a[c];
      r_s[c] = row_dot(c, w) + xi[con.example] - con.loss - s[c];
    }
  };
  auto mu_of = [&] {
    Wide sum = 0;
    for (std::size_t c = 0; c < n; ++c) sum += s[c] * a[c];
    for (std::size_t i = 0; i < m; ++i) sum += xi[i] * nu[i];
    return sum / static_cast<Wide>(n + m);
  };

  // Solves the Newton system for the current r_a, r_nu.
  auto newton = [&]() -> bool {
    std::fill(schur.begin(), schur.end(), Wide{0});
    for (std::size_t k = 0; k < d; ++k) schur[k * d + k] = 1;
    for (std::size_t k = 0; k < d; ++k) rhs[k] = -r_w[k];
    for (std::size_t i = 0; i < m; ++i) {
      h[i] = nu[i] / xi[i];
      rhs_xi[i] = -r_xi[i] + r_nu[i] / xi[i];
      std::fill(mvec[i].begin(), mvec[i].end(), Wide{0});
    }
    for (std::size_t c = 0; c < n; ++c) {
      const auto& con = constraints_[c];
      const auto& dl = con.delta;
      const Wide t = a[c] / s[c];
      const Wide extra = -t * r_s[c] + r_a[c] / s[c];
      for (std::size_t k = 0; k < d; ++k) {
        const Wide tk = t * dl[k];
        for (std::size_t l = 0; l <= k; ++l) schur[k * d + l] += tk * dl[l];
        rhs[k] += dl[k] * extra;
        mvec[con.example][k] += tk;
      }
      h[con.example] += t;
      rhs_xi[con.example] += extra;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const auto& mi = mvec[i];
      for (std::size_t k = 0; k < d; ++k) {
        const Wide mk = mi[k] / h[i];
        for (std::size_t l = 0; l <= k; ++l) schur[k * d + l] -= mk * mi[l];
        rhs[k] -= mk * rhs_xi[i];
      }
    }
    // Cholesky of the lower triangle in place.
    for (std::size_t k = 0; k < d; ++k) {
      Wide diag = schur[k * d + k];
      for (std::size_t l = 0; l < k; ++l) diag -= schur[k * d + l] * schur[k * d + l];
      if (!(diag > 0)) return false;
      diag = std::sqrt(diag);
      schur[k * d + k] = diag;
      for (std::size_t r = k + 1; r < d; ++r) {
        Wide v = schur[r * d + k];
        for (std::size_t l = 0; l < k; ++l) v -= schur[r * d + l] * schur[k * d + l];
        schur[r * d + k] = v / diag;
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      Wide v = rhs[k];
      for (std::size_t l = 0; l < k; ++l) v -= schur[k * d + l] * dw[l];
      dw[k] = v / schur[k * d + k];
    }
    for (std::size_t k = d; k-- > 0;) {
      Wide v = dw[k];
      for (std::size_t r = k + 1; r < d; ++r) v -= schur[r * d + k] * dw[r];
      dw[k] = v / schur[k * d + k];
    }
    for (std::size_t i = 0; i < m; ++i) {
      Wide v = rhs_xi[i];
      for (std::size_t k = 0; k < d; ++k) v -= mvec[i][k] * dw[k];
      dxi[i] = v / h[i];
    }
    // Remaining steps from the linear equations rather than by dividing
    // through the complementarity products, which are tiny near the optimum.
    for (std::size_t i = 0; i < m; ++i) dnu[i] = r_xi[i];
    for (std::size_t c = 0; c < n; ++c) {
      const auto& con = constraints_[c];
      ds[c] = r_s[c] + row_dot(c, dw) + dxi[con.example];
      da[c] = (r_a[c] - a[c] * ds[c]) / s[c];
      dnu[con.example] -= da[c];
    }
    return true;
  };
  auto max_step = [&] {
    Wide step = 1;
    auto limit = [&](Wide v, Wide dv) {
      if (dv < 0) step = std::min(step, -v / dv);
    };
    for (std::size_t c = 0; c < n; ++c) {
      limit(s[c], ds[c]);
      limit(a[c], da[c]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      limit(xi[i], dxi[i]);
      limit(nu[i], dnu[i]);
    }
    return step;
  };

  // Best iterate by max(residual, mu). Once mu drops far below machine
  // precision the residuals grow again; the loop stops after a run of
  // iterations without improvement and restores the best one.
  struct Iterate {
    Vec w, xi, nu, s, a;
  } saved{w, xi, nu, s, a};
  Wide best_merit = std::numeric_limits<Wide>::infinity();
  int stale = 0;
  for (int it = 0; it < 200; ++it) {
    residuals();
    const Wide mu = mu_of();
    Wide res = 0;
    for (Wide v : r_w) res = std::max(res, std::abs(v));
    for (Wide v : r_xi) res = std::max(res, std::abs(v));
    for (Wide v : r_s) res = std::max(res, std::abs(v));
    const Wide merit = std::max(res, mu);
    if (merit < best_merit) {
      best_merit = merit;
      saved = {w, xi, nu, s, a};
      stale = 0;
    } else if (res < 1e-6L * (1 + cap) && ++stale >= 5) {
      break;
    }
    if (mu < 1e-24L * (1 + cap) && res < 1e-15L * (1 + cap)) break;

    // Predictor.
    for (std::size_t c = 0; c < n; ++c) r_a[c] = -s[c] * a[c];
    for (std::size_t i = 0; i < m; ++i) r_nu[i] = -xi[i] * nu[i];
    if (!newton()) break;
    const Wide step_aff = max_step();
    Wide mu_aff = 0;
    for (std::size_t c = 0; c < n; ++c) {
      mu_aff += (s[c] + step_aff * ds[c]) * (a[c] + step_aff * da[c]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      mu_aff += (xi[i] + step_aff * dxi[i]) * (nu[i] + step_aff * dnu[i]);
    }
    mu_aff /= static_cast<Wide>(n + m);
    const Wide ratio = mu_aff / mu;
    const Wide sigma = ratio * ratio * ratio;

    // Corrector.
    for (std::size_t c = 0; c < n; ++c) r_a[c] = sigma * mu - s[c] * a[c] - ds[c] * da[c];
    for (std::size_t i = 0; i < m; ++i) r_nu[i] = sigma * mu - xi[i] * nu[i] - dxi[i] * dnu[i];
    if (!newton()) break;
    const Wide step = std::min<Wide>(1, 0.995L * max_step());
    for (std::size_t k = 0; k < d; ++k) w[k] += step * dw[k];
    for (std::size_t c = 0; c < n; ++c) {
      s[c] += step * ds[c];
      a[c] += step * da[c];
    }
    for (std::size_t i = 0; i < m; ++i) {
      xi[i] += step * dxi[i];
      nu[i] += step * dnu[i];
    }
  }
  w = std::move(saved.w);
  xi = std::move(saved.xi);
  nu = std::move(saved.nu);
  s = std::move(saved.s);
  a = std::move(saved.a);

  // Round to a complementary active set and restore the budget equalities.
  for (std::size_t c = 0; c < n; ++c) alpha_[c] = a[c] > s[c] ? static_cast<double>(a[c]) : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double used = 0.0;
    for (std::size_t c : blocks[i]) used += alpha_[c];
    // xi_i > 0 forces the budget to be used up.
    if (used > budget || (nu[i] <= xi[i] && used > 0.0)) {
      for (std::size_t c : blocks[i]) alpha_[c] *= budget / used;
      slack_[i] = 0.0;
    } else {
      slack_[i] = budget - used;
    }
  }
  std::vector<double> raw(n);
  for (std::size_t c = 0; c < n; ++c) raw[c] = std::max(0.0, static_cast<double>(a[c]));
  for (std::size_t i = 0; i < m; ++i) {
    double used = 0.0;
    for (std::size_t c : blocks[i]) used += raw[c];
    if (used > budget) {
      for (std::size_t c : blocks[i]) raw[c] *= budget / used;
    }
  }
  return raw;
}

double qp_primal(std::span<const QpConstraint> constraints, std::span<const double> w,
                 std::size_t num_examples, double c, std::vector<double>* xi_out) {
  std::vector<double> xi(num_examples, 0.0);
  for (const auto& con : constraints) {
    const double h = con.loss - dot(w, con.delta);
    xi[con.example] = std::max(xi[con.example], h);
  }
  double sum = 0.0;
  for (double x : xi) sum += x;
  const double value = 0.5 * dot(w, w) + c / static_cast<double>(num_examples) * sum;
  if (xi_out != nullptr) *xi_out = std::move(xi);
  return value;
}

QpSolution solve_restricted_qp(std::span<const QpConstraint> constraints, std::size_t dim,
                               std::size_t num_examples, const QpOptions& options) {
  RestrictedQp qp(dim, num_examples);
  for (const auto& con : constraints) qp.add(con.example, con.delta, con.loss);
  return qp.solve(options);
}

}  // namespace divrank
