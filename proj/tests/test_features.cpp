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

#include <algorithm>
#include <cmath>
#include <random>

#include "divrank/features.hpp"
#include "doctest.h"

using namespace divrank;

namespace {

std::vector<std::vector<std::string>> cats(std::initializer_list<const char*> paths) {
  std::vector<std::vector<std::string>> out;
  for (const char* p : paths) out.push_back(parse_category_path(p));
  return out;
}

DocumentRecord doc(std::string id, std::string url = "") {
  DocumentRecord d;
  d.doc_id = std::move(id);
  d.url = std::move(url);
  d.relevance_features = {0.5};
  return d;
}

SparseVector random_sparse(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SparseVector v;
  for (std::uint32_t t = 0; t < 8; ++t) {
    if (unit(rng) < 0.5) v.emplace_back(t, unit(rng));
  }
  return v;
}

}  // namespace

TEST_CASE("category paths") {
  CHECK(parse_category_path("Arts/Movies/Awards/") ==
        std::vector<std::string>{"Arts", "Movies", "Awards"});
  CHECK(parse_category_path("/Top//Arts") == std::vector<std::string>{"Top", "Arts"});
  CHECK(parse_category_path("").empty());
}

TEST_CASE("category distance") {
  CHECK(odp_distance(cats({"Arts/Movies/Awards"}),
                     cats({"Arts/Movies/Filmmaking/Directing/Directors"})) == 3.0 / 5.0);
  CHECK(odp_distance(cats({"Arts/Movies"}), cats({"Arts/Movies"})) == 0.0);
  CHECK(odp_distance(cats({"Arts/Movies"}), cats({"Science/Physics/Optics"})) == 1.0);
  CHECK(odp_distance({}, cats({"Arts"})) == 0.5);
  // Mean over all pairs: (0 + 1 + 0.5 + 1) / 4.
  CHECK(odp_distance(cats({"A/B", "C"}), cats({"A/B", "A/D"})) == doctest::Approx(0.625));
}

TEST_CASE("cosine dissimilarity") {
  const std::vector<double> a = {1, 1, 0};
  const std::vector<double> b = {1, 0, 0};
  CHECK(cosine_dissim(a, b) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
  CHECK(cosine_dissim(a, a) == doctest::Approx(0.0));
  CHECK(cosine_dissim(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  CHECK(cosine_dissim(std::vector<double>{0, 0}, std::vector<double>{0, 1}) == 1.0);

  const SparseVector sa = {{0, 1.0}, {1, 1.0}};
  const SparseVector sb = {{0, 1.0}};
  CHECK(cosine_dissim(sa, sb) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
  CHECK(cosine_dissim(sa, SparseVector{}) == 1.0);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = random_sparse(rng);
    if (v.empty()) continue;
    auto scaled = v;
    for (auto& [t, x] : scaled) x *= 3.5;
    CHECK(cosine_dissim(v, v) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cosine_dissim(v, scaled) == doctest::Approx(0.0).epsilon(1e-12));
    const auto w = random_sparse(rng);
    const double d = cosine_dissim(v, w);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK(d == cosine_dissim(w, v));
  }
}

TEST_CASE("tf-idf weights") {
  const TermCounts a = {{"cat", 2.0}, {"dog", 1.0}};
  const TermCounts b = {{"cat", 1.0}};
  const std::vector<const TermCounts*> docs = {&a, &b};
  const auto v = tfidf_vectors(docs);
  REQUIRE(v.size() == 2);
  // cat: df 2 -> idf ln(3/3)+1 = 1; dog: df 1 -> ln(3/2)+1.
  REQUIRE(v[0].size() == 2);
  CHECK(v[0][0].second == doctest::Approx(2.0));
  CHECK(v[0][1].second == doctest::Approx(std::log(1.5) + 1.0));
  CHECK(v[1][0].second == doctest::Approx(1.0));
}

TEST_CASE("link dissimilarity") {
  auto a = doc("a", "a.com/x");
  auto b = doc("b", "b.com/y");
  CHECK(link_dissim(a, b) == 1.0);
  a.outlinks = {"b"};
  CHECK(link_dissim(a, b) == 0.0);
  CHECK(link_dissim(b, a) == 0.0);
  a.outlinks.clear();
  b.inlinks = {"a.com/x"};
  CHECK(link_dissim(a, b) == 0.0);
}

TEST_CASE("url dissimilarity") {
  CHECK(url_dissim("a.com/x", "a.com/x/y") == 0.0);
  CHECK(url_dissim("http://a.com/x/y", "a.com/x") == 0.0);
  CHECK(url_dissim("news.a.com/p", "blog.a.com/q") == 0.5);
  CHECK(url_dissim("a.com/p", "a.com/q") == 0.5);
  CHECK(url_dissim("a.com", "b.org") == 1.0);
  // A string prefix that stops inside a path segment is not a URL prefix.
  CHECK(url_dissim("a.com/x", "a.com/xy") == 0.5);
  CHECK(url_dissim("", "a.com") == 1.0);
  CHECK(registered_domain("http://news.bbc.co.uk/a") == "bbc.co.uk");
}

TEST_CASE("channel names") {
  for (auto c : all_channels()) CHECK(parse_channel(channel_name(c)) == c);
  CHECK_FALSE(parse_channel("colour").has_value());
  CHECK(all_channels().size() == kNumDiversityChannels);
}

TEST_CASE("sparsification and normalization") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6 + static_cast<std::size_t>(trial) % 5;
    PairwiseTensor t(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        t.set(i, j, 0, unit(rng));
        t.set(i, j, 1, 3.0 * unit(rng));
      }
    }
    auto dense = t;
    sparsify_and_normalize(dense, n);  // top_t >= n - 1: nothing dropped
    auto sparse = t;
    sparsify_and_normalize(sparse, 2);
    for (std::size_t f = 0; f < 2; ++f) {
      double lo = 1e9;
      double hi = -1e9;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          lo = std::min(lo, t.at(i, j, f));
          hi = std::max(hi, t.at(i, j, f));
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(sparse.at(i, i, f) == 0.0);
        std::size_t kept = 0;
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          CHECK(dense.at(i, j, f) ==
                doctest::Approx((t.at(i, j, f) - lo) / (hi - lo)).epsilon(1e-12));
          CHECK(sparse.at(i, j, f) == sparse.at(j, i, f));
          CHECK(sparse.at(i, j, f) >= 0.0);
          CHECK(sparse.at(i, j, f) <= 1.0);
          if (sparse.at(i, j, f) > 0.0) ++kept;
        }
        CHECK(kept >= 1);
      }
    }
  }
  PairwiseTensor flat(4, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) flat.set(i, j, 0, 0.7);
  }
  sparsify_and_normalize(flat, 100);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(flat.at(i, j, 0) == 0.0);
  }
}

TEST_CASE("assembled tensor") {
  std::vector<DocumentRecord> docs = {doc("a", "a.com/x"), doc("b", "a.com/x/y"),
                                      doc("c", "c.org"), doc("d", "news.a.com")};
  docs[0].field(TextField::kBody) = {{"red", 2}, {"fish", 1}};
  docs[1].field(TextField::kBody) = {{"red", 1}};
  docs[2].field(TextField::kBody) = {{"blue", 1}};
  docs[0].categories = cats({"Arts/Movies"});
  docs[2].categories = cats({"Science"});
  docs[3].outlinks = {"a"};
  DenseMatrix topics(4, 2);
  topics(0, 0) = 1.0;
  topics(1, 0) = 1.0;
  topics(2, 1) = 1.0;
  topics(3, 0) = 0.5;
  topics(3, 1) = 0.5;
  const auto t = assemble_pairwise(docs, &topics, PairwiseConfig{});
  CHECK(t.num_channels() == kNumDiversityChannels);
  for (std::size_t f = 0; f < t.num_channels(); ++f) {
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(t.at(i, i, f) == 0.0);
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(t.at(i, j, f) == t.at(j, i, f));
        CHECK(t.at(i, j, f) >= 0.0);
        CHECK(t.at(i, j, f) <= 1.0);
      }
    }
  }
  const auto topic = static_cast<std::size_t>(DiversityChannel::kTopic);
  CHECK(t.at(0, 1, topic) == 0.0);
  CHECK(t.at(0, 2, topic) == 1.0);
  const auto url = static_cast<std::size_t>(DiversityChannel::kUrl);
  CHECK(t.at(0, 1, url) == 0.0);
  CHECK(t.at(0, 2, url) == 1.0);
  CHECK(t.at(0, 3, url) == 0.5);

  PairwiseConfig no_topic;
  no_topic.channels = {DiversityChannel::kText, DiversityChannel::kLink};
  const auto small = assemble_pairwise(docs, nullptr, no_topic);
  CHECK(small.num_channels() == 2);
  CHECK(small.at(0, 3, 1) == 0.0);
  CHECK(small.at(1, 2, 1) == 1.0);
  CHECK_THROWS(assemble_pairwise(docs, nullptr, PairwiseConfig{}));
}

TEST_CASE("text corpus merges fields") {
  auto a = doc("a");
  a.field(TextField::kBody) = {{"x", 1}, {"y", 2}};
  a.field(TextField::kTitle) = {{"x", 3}};
  auto b = doc("b");
  b.field(TextField::kAnchor) = {{"z", 1}};
  const std::vector<const DocumentRecord*> docs = {&a, &b};
  const auto corpus = text_corpus(docs);
  CHECK(corpus.vocab_size == 3);
  REQUIRE(corpus.docs.size() == 2);
  CHECK(corpus.docs[0] == Corpus::Row{{0, 4.0}, {1, 2.0}});
  CHECK(corpus.docs[1] == Corpus::Row{{2, 1.0}});
}
