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

#include "divrank/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "divrank/error.hpp"

namespace divrank {

std::string_view field_name(TextField field) {
  switch (field) {
    case TextField::kBody:
      return "body";
    case TextField::kTitle:
      return "title";
    case TextField::kAnchor:
      return "anchor";
  }
  return "?";
}

SubtopicJudgments SubtopicJudgments::uniform(std::size_t num_subtopics,
                                             std::size_t num_docs) {
  SubtopicJudgments j;
  j.num_subtopics = num_subtopics;
  j.num_docs = num_docs;
  j.probs.assign(num_subtopics,
                 num_subtopics == 0 ? 0.0 : 1.0 / static_cast<double>(num_subtopics));
  j.rel.assign(num_subtopics * num_docs, 0);
  return j;
}

bool SubtopicJudgments::any_relevant() const {
  for (std::size_t i = 0; i < num_subtopics; ++i) {
    if (probs[i] <= 0.0) continue;
    for (std::size_t d = 0; d < num_docs; ++d) {
      if (relevant(i, d)) return true;
    }
  }
  return false;
}

std::string_view measure_name(Measure measure) {
  switch (measure) {
    case Measure::kAlphaNdcg:
      return "alpha-ndcg";
    case Measure::kErrIa:
      return "err-ia";
    case Measure::kNrbp:
      return "nrbp";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  std::string key;
  for (char c : name) {
    key.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "alpha-ndcg" || key == "andcg") return Measure::kAlphaNdcg;
  if (key == "err-ia" || key == "erria") return Measure::kErrIa;
  if (key == "nrbp") return Measure::kNrbp;
  throw InvalidArgument(fmt::format("unknown measure '{}'", name));
}

void MeasureParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument(fmt::format("alpha must lie in (0,1], got {}", alpha));
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw InvalidArgument(fmt::format("beta must lie in (0,1), got {}", beta));
  }
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
}

std::vector<double> WeightVector::flat() const {
  std::vector<double> out;
  out.reserve(dimension());
  out.insert(out.end(), w_rel.begin(), w_rel.end());
  out.insert(out.end(), w_div.begin(), w_div.end());
  return out;
}

WeightVector WeightVector::from_flat(std::span<const double> flat,
                                     std::size_t rel_dim) {
  if (rel_dim > flat.size()) {
    throw InvalidArgument("relevance dimension exceeds weight vector length");
  }
  WeightVector w;
  w.w_rel.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(rel_dim));
  w.w_div.assign(flat.begin() + static_cast<std::ptrdiff_t>(rel_dim), flat.end());
  return w;
}

ValidationReport validate_instance(const QueryInstance& q,
                                   std::optional<std::size_t> declared_rel_dim) {
  ValidationReport report;
  auto fail = [&](std::string message) { report.errors.push_back(std::move(message)); };

  const std::size_t n = q.docs.size();
  std::optional<std::size_t> rel_dim = declared_rel_dim;
  for (std::size_t d = 0; d < n; ++d) {
    const auto& doc = q.docs[d];
    if (!rel_dim) rel_dim = doc.relevance_features.size();
    if (doc.relevance_features.size() != *rel_dim) {
      fail(fmt::format("relevance dimension mismatch: doc {} has {} features, expected {}",
                       doc.doc_id, doc.relevance_features.size(), *rel_dim));
    }
    for (double v : doc.relevance_features) {
      if (!(v >= 0.0 && v <= 1.0)) {
        fail(fmt::format("relevance feature out of range: doc {} value {}", doc.doc_id, v));
        break;
      }
    }
  }

  const auto& j = q.judgments;
  if (j.num_subtopics < 1) fail("judgments must declare at least one subtopic");
  if (j.probs.size() != j.num_subtopics) {
    fail(fmt::format("probs has {} entries for {} subtopics", j.probs.size(),
                     j.num_subtopics));
  } else {
    double sum = 0.0;
    bool negative = false;
    for (double p : j.probs) {
      negative |= !(p >= 0.0);
      sum += p;
    }
    if (negative) fail("probs has a negative entry");
    if (std::abs(sum - 1.0) > 1e-9) {
      fail(fmt::format("probs not normalized: sum is {}", sum));
    }
  }
  if (j.num_docs != n || j.rel.size() != j.num_subtopics * n) {
    fail(fmt::format("rel matrix shape {}x{} does not match {} subtopics x {} docs",
                     j.num_subtopics, j.num_docs, j.num_subtopics, n));
  } else {
    for (auto g : j.rel) {
      if (g > 1) {
        fail("rel entries must be 0 or 1");
        break;
      }
    }
  }

  const auto& pw = q.pairwise;
  if (pw.num_docs() != n) {
    fail(fmt::format("pairwise tensor covers {} docs, query has {}", pw.num_docs(), n));
    return report;
  }
  bool asym_reported = false;
  bool range_reported = false;
  bool diag_reported = false;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      for (std::size_t f = 0; f < pw.num_channels(); ++f) {
        const double ab = pw.at(a, b, f);
        const double ba = pw.at(b, a, f);
        if (a == b) {
          if (ab != 0.0 && !diag_reported) {
            fail(fmt::format("nonzero pairwise diagonal at ({},{},{})", a, a, f));
            diag_reported = true;
          }
          continue;
        }
        if (ab != ba && !asym_reported) {
          fail(fmt::format("asymmetric pairwise at ({},{},{}): {} vs {}", a, b, f, ab, ba));
          asym_reported = true;
        }
        if (!(ab >= 0.0 && ab <= 1.0 && ba >= 0.0 && ba <= 1.0) && !range_reported) {
          fail(fmt::format("pairwise value out of [0,1] at ({},{},{})", a, b, f));
          range_reported = true;
        }
      }
    }
  }
  return report;
}

void check_ranking(std::span<const DocIndex> ranking, std::size_t num_docs,
                   std::size_t max_length) {
  if (ranking.size() > max_length) {
    throw InvalidRanking(fmt::format("ranking has {} entries, cutoff is {}",
                                     ranking.size(), max_length));
  }
  std::vector<bool> seen(num_docs, false);
  for (DocIndex d : ranking) {
    if (d >= num_docs) {
      throw InvalidRanking(fmt::format("document index {} out of range (n={})", d, num_docs));
    }
    if (seen[d]) throw InvalidRanking(fmt::format("duplicate document index {}", d));
    seen[d] = true;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace divrank
