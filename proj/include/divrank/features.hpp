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
// Pairwise diversity features. Every channel is a dissimilarity in [0,1]:
//
//   topic   Euclidean distance of pLSA topic mixtures
//   text    TF-IDF cosine dissimilarity of the body field
//   title   same, title field
//   anchor  same, anchor-text field
//   odp     mean prefix distance between ODP category paths
//   link    0 if either document links to the other, else 1
//   url     0 for prefix URLs, 0.5 for same site/domain, else 1
//

#ifndef DIVRANK_FEATURES_HPP_
#define DIVRANK_FEATURES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "divrank/core.hpp"
#include "divrank/plsa.hpp"

namespace divrank {

enum class DiversityChannel : std::size_t {
  kTopic = 0,
  kText,
  kTitle,
  kAnchor,
  kOdp,
  kLink,
  kUrl,
};
inline constexpr std::size_t kNumDiversityChannels = 7;

std::string_view channel_name(DiversityChannel channel);
std::optional<DiversityChannel> parse_channel(std::string_view name);
std::vector<DiversityChannel> all_channels();

// Sorted by term id.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

// 1 - cos(a, b); 1 when either vector is all-zero.
double cosine_dissim(const SparseVector& a, const SparseVector& b);
double cosine_dissim(std::span<const double> a, std::span<const double> b);

// TF-IDF vectors for one field over a candidate set: tf is the raw count,
// idf = ln((n + 1) / (df + 1)) + 1 with df counted within the set.
std::vector<SparseVector> tfidf_vectors(std::span<const TermCounts* const> docs);

// "Arts/Movies/Awards/" -> {"Arts", "Movies", "Awards"}.
std::vector<std::string> parse_category_path(std::string_view path);

// 1 - |common prefix| / max(|u|, |v|), lengths in segments.
double category_distance(std::span<const std::string> u, std::span<const std::string> v);

// Mean category_distance over all category pairs; 0.5 if either set is empty.
double odp_distance(std::span<const std::vector<std::string>> cats_i,
                    std::span<const std::vector<std::string>> cats_j);

double link_dissim(const DocumentRecord& a, const DocumentRecord& b);

double url_dissim(std::string_view url_i, std::string_view url_j);

// Registered domain of a URL host ("news.bbc.co.uk" -> "bbc.co.uk"), empty
// when the URL cannot be parsed.
std::string registered_domain(std::string_view url);

// Text corpus for pLSA: every field of every document merged into one bag.
// Terms are numbered in lexicographic order.
Corpus text_corpus(std::span<const DocumentRecord* const> docs);

struct PairwiseConfig {
  std::vector<DiversityChannel> channels = all_channels();
  // Per document and channel, only the top_t largest pair values are kept.
  std::size_t top_t = 100;
};

// Raw (unsparsified, unnormalized) channel value for one pair.
// topic_rows holds one topic mixture per document; it may be empty when the
// topic channel is not requested.
double channel_value(DiversityChannel channel, const DocumentRecord& a,
                     const DocumentRecord& b, std::span<const double> topic_a,
                     std::span<const double> topic_b, const SparseVector* tfidf_a,
                     const SparseVector* tfidf_b);

// Keeps, for each document and channel, the top_t largest off-diagonal values
// (ties to the lower partner index); a pair survives if either endpoint keeps
// it. Then min-max normalizes each channel over all off-diagonal entries to
// [0,1] (a zero range maps the channel to 0). Diagonal is zeroed.
void sparsify_and_normalize(PairwiseTensor& tensor, std::size_t top_t);

// Builds the query's pairwise tensor. topics must have one row per document
// when the topic channel is enabled.
PairwiseTensor assemble_pairwise(std::span<const DocumentRecord> docs,
                                 const DenseMatrix* topics, const PairwiseConfig& config);

}  // namespace divrank

#endif  // DIVRANK_FEATURES_HPP_
