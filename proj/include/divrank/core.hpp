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
// Domain data model: documents, subtopic judgments, pairwise diversity
// tensors, query instances, rankings, measure parameters and weights.
//
// Documents are addressed by their dense index within a QueryInstance;
// string ids only matter at I/O boundaries.
//

#ifndef DIVRANK_CORE_HPP_
#define DIVRANK_CORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divrank {

using DocIndex = std::size_t;

// Ordered list of distinct document indices. Position 0 is rank 1.
using Ranking = std::vector<DocIndex>;

// term -> raw count for one document field.
using TermCounts = std::map<std::string, double>;

enum class TextField : std::size_t { kBody = 0, kTitle = 1, kAnchor = 2 };
inline constexpr std::size_t kNumTextFields = 3;
std::string_view field_name(TextField field);

struct DocumentRecord {
  std::string doc_id;
  std::vector<double> relevance_features;
  // Empty map means the field is absent.
  std::array<TermCounts, kNumTextFields> fields;
  // ODP category paths, each a list of segments.
  std::vector<std::vector<std::string>> categories;
  std::vector<std::string> inlinks;
  std::vector<std::string> outlinks;
  std::string url;

  const TermCounts& field(TextField f) const {
    return fields[static_cast<std::size_t>(f)];
  }
  TermCounts& field(TextField f) { return fields[static_cast<std::size_t>(f)]; }
};

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Binary per-subtopic relevance. rel is M x n, row-major.
struct SubtopicJudgments {
  std::size_t num_subtopics = 0;
  std::size_t num_docs = 0;
  std::vector<double> probs;
  std::vector<std::uint8_t> rel;

  // All-zero judgments with uniform subtopic probabilities 1/M.
  static SubtopicJudgments uniform(std::size_t num_subtopics, std::size_t num_docs);

  bool relevant(std::size_t subtopic, DocIndex doc) const {
    return rel[subtopic * num_docs + doc] != 0;
  }
  void set_relevant(std::size_t subtopic, DocIndex doc, bool value) {
    rel[subtopic * num_docs + doc] = value ? 1 : 0;
  }
  // True iff some document is relevant to some subtopic with p_i > 0.
  bool any_relevant() const;
};

// n x n x F tensor of pairwise diversity features. Stored densely with both
// orientations so that pair(i, j) is a contiguous span of F channel values.
class PairwiseTensor {
 public:
  PairwiseTensor() = default;
  PairwiseTensor(std::size_t num_docs, std::size_t num_channels)
      : n_(num_docs), f_(num_channels), values_(num_docs * num_docs * num_channels) {}

  std::size_t num_docs() const { return n_; }
  std::size_t num_channels() const { return f_; }

  double at(DocIndex i, DocIndex j, std::size_t channel) const {
    return values_[(i * n_ + j) * f_ + channel];
  }
  std::span<const double> pair(DocIndex i, DocIndex j) const {
    return {values_.data() + (i * n_ + j) * f_, f_};
  }
  // Writes both (i, j) and (j, i).
  void set(DocIndex i, DocIndex j, std::size_t channel, double value) {
    values_[(i * n_ + j) * f_ + channel] = value;
    values_[(j * n_ + i) * f_ + channel] = value;
  }
  // Writes only (i, j). Used by ingestion paths that must be able to
  // represent (and then reject) asymmetric input.
  void set_directed(DocIndex i, DocIndex j, std::size_t channel, double value) {
    values_[(i * n_ + j) * f_ + channel] = value;
  }

  bool operator==(const PairwiseTensor&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t f_ = 0;
  std::vector<double> values_;
};

struct QueryInstance {
  std::string query_id;
  std::vector<DocumentRecord> docs;
  PairwiseTensor pairwise;
  SubtopicJudgments judgments;

  std::size_t num_docs() const { return docs.size(); }
};

enum class Measure { kAlphaNdcg, kErrIa, kNrbp };

std::string_view measure_name(Measure measure);
// Accepts "alpha-ndcg", "err-ia", "nrbp" (case-insensitive, '_' or '-').
Measure parse_measure(std::string_view name);

struct MeasureParams {
  Measure measure = Measure::kErrIa;
  double alpha = 0.5;
  double beta = 0.5;
  std::size_t cutoff = 20;

  // Throws InvalidArgument unless alpha in (0,1], beta in (0,1), cutoff >= 1.
  void validate() const;
};

struct WeightVector {
  std::vector<double> w_rel;
  std::vector<double> w_div;

  static WeightVector zeros(std::size_t rel_dim, std::size_t div_dim) {
    return {std::vector<double>(rel_dim, 0.0), std::vector<double>(div_dim, 0.0)};
  }
  std::size_t dimension() const { return w_rel.size() + w_div.size(); }
  // [w_rel, w_div] concatenated.
  std::vector<double> flat() const;
  static WeightVector from_flat(std::span<const double> flat, std::size_t rel_dim);
};

struct ValidationReport {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// Reports every violated invariant of q. When declared_rel_dim is given, every
// relevance vector must have exactly that length; otherwise all must agree
// with the first document.
ValidationReport validate_instance(const QueryInstance& q,
                                   std::optional<std::size_t> declared_rel_dim = {});

// Throws InvalidRanking for duplicates, indices >= num_docs or a ranking
// longer than max_length.
void check_ranking(std::span<const DocIndex> ranking, std::size_t num_docs,
                   std::size_t max_length);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace divrank

#endif  // DIVRANK_CORE_HPP_
