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

#include <cmath>
#include <random>

#include "divrank/core.hpp"
#include "divrank/error.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace divrank;

namespace {

QueryInstance small_instance() {
  std::mt19937_64 rng(5);
  return oracle::random_instance(rng, 4, 2, 3, 2);
}

bool mentions(const ValidationReport& report, const std::string& needle) {
  for (const auto& e : report.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("well-formed instance validates") {
  const auto q = small_instance();
  const auto report = validate_instance(q);
  CHECK(report.ok());
  CHECK(validate_instance(q, 3).ok());
}

TEST_CASE("unnormalized probabilities are reported") {
  auto q = small_instance();
  q.judgments.probs = {0.5, 0.4};
  const auto report = validate_instance(q);
  CHECK_FALSE(report.ok());
  CHECK(mentions(report, "probs not normalized"));
}

TEST_CASE("asymmetric pairwise values are reported") {
  auto q = small_instance();
  q.pairwise.set_directed(1, 2, 0, 0.3);
  q.pairwise.set_directed(2, 1, 0, 0.4);
  CHECK(mentions(validate_instance(q), "asymmetric pairwise"));
}

TEST_CASE("relevance dimension and range are checked") {
  auto q = small_instance();
  CHECK_FALSE(validate_instance(q, 4).ok());
  q.docs[2].relevance_features.push_back(0.5);
  CHECK_FALSE(validate_instance(q).ok());
  q = small_instance();
  q.docs[0].relevance_features[0] = 1.5;
  CHECK_FALSE(validate_instance(q).ok());
}

TEST_CASE("nonzero diagonal and out-of-range pairs are reported") {
  auto q = small_instance();
  q.pairwise.set_directed(1, 1, 0, 0.2);
  CHECK_FALSE(validate_instance(q).ok());
  q = small_instance();
  q.pairwise.set(0, 3, 1, 1.2);
  CHECK_FALSE(validate_instance(q).ok());
}

TEST_CASE("validation has no side effects and is repeatable") {
  auto q = small_instance();
  q.judgments.probs = {0.7, 0.7};
  const auto copy = q;
  const auto first = validate_instance(q);
  const auto second = validate_instance(q);
  CHECK(first.errors == second.errors);
  CHECK(q.pairwise == copy.pairwise);
  CHECK(q.judgments.probs == copy.judgments.probs);
}

TEST_CASE("measure params validation") {
  MeasureParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.alpha = 1.0;
  CHECK_NOTHROW(p.validate());
  p.beta = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.beta = 0.5;
  p.cutoff = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("measure names round-trip") {
  for (Measure m : {Measure::kAlphaNdcg, Measure::kErrIa, Measure::kNrbp}) {
    CHECK(parse_measure(measure_name(m)) == m);
  }
  CHECK(parse_measure("ERR_IA") == Measure::kErrIa);
  CHECK_THROWS_AS(parse_measure("ndcg"), InvalidArgument);
}

TEST_CASE("ranking checks") {
  CHECK_NOTHROW(check_ranking(Ranking{2, 0, 1}, 3, 3));
  CHECK_THROWS_AS(check_ranking(Ranking{1, 1}, 3, 3), InvalidRanking);
  CHECK_THROWS_AS(check_ranking(Ranking{3}, 3, 3), InvalidRanking);
  CHECK_THROWS_AS(check_ranking(Ranking{0, 1, 2}, 3, 2), InvalidRanking);
}

TEST_CASE("weight vector flattening") {
  const WeightVector w{{1.0, 2.0}, {3.0}};
  CHECK(w.dimension() == 3);
  const auto flat = w.flat();
  CHECK(flat == std::vector<double>{1.0, 2.0, 3.0});
  const auto back = WeightVector::from_flat(flat, 2);
  CHECK(back.w_rel == w.w_rel);
  CHECK(back.w_div == w.w_div);
}

TEST_CASE("uniform judgments") {
  const auto j = SubtopicJudgments::uniform(4, 3);
  CHECK(j.probs == std::vector<double>(4, 0.25));
  CHECK_FALSE(j.any_relevant());
  auto k = j;
  k.set_relevant(3, 2, true);
  CHECK(k.relevant(3, 2));
  CHECK(k.any_relevant());
  k.probs = {0.5, 0.5, 0.0, 0.0};
  CHECK_FALSE(k.any_relevant());
}
