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

#include "divrank/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "divrank/error.hpp"

namespace divrank {
namespace {

constexpr std::array<std::string_view, kNumDiversityChannels> kChannelNames = {
    "topic", "text", "title", "anchor", "odp", "link", "url"};

struct ParsedUrl {
  std::string host;
  std::string full;  // host + path, no scheme, no trailing '/'
};

std::optional<ParsedUrl> parse_url(std::string_view raw) {
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) {
    raw.remove_prefix(1);
  }
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) {
    raw.remove_suffix(1);
  }
  if (raw.empty()) return std::nullopt;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) return std::nullopt;
  }
  if (auto scheme = raw.find("://"); scheme != std::string_view::npos) {
    raw.remove_prefix(scheme + 3);
  }
  const auto host_end = raw.find_first_of("/?#");
  std::string host(raw.substr(0, host_end));
  std::string path(host_end == std::string_view::npos ? std::string_view{}
                                                      : raw.substr(host_end));
  for (char& c : host) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (auto colon = host.find(':'); colon != std::string::npos) host.resize(colon);
  if (host.starts_with("www.")) host.erase(0, 4);
  if (host.empty() || host.front() == '.' || host.back() == '.' ||
      host.find("..") != std::string::npos) {
    return std::nullopt;
  }
  for (char c : host) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')) {
      return std::nullopt;
    }
  }
  while (!path.empty() && path.back() == '/') path.pop_back();
  return ParsedUrl{host, host + path};
}

std::string domain_of_host(const std::string& host) {
  std::vector<std::string_view> labels;
  std::string_view rest(host);
  while (true) {
    const auto dot = rest.find('.');
    labels.push_back(rest.substr(0, dot));
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  if (labels.size() <= 2) return host;
  static constexpr std::array<std::string_view, 9> kSecondLevel = {
      "co", "com", "ac", "gov", "org", "net", "edu", "ne", "or"};
  std::size_t keep = 2;
  const auto& tld = labels.back();
  const auto& sld = labels[labels.size() - 2];
  if (tld.size() == 2 &&
      std::find(kSecondLevel.begin(), kSecondLevel.end(), sld) != kSecondLevel.end()) {
    keep = 3;
  }
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out.append(labels[i]);
  }
  return out;
}

bool is_path_prefix(const std::string& shorter, const std::string& longer) {
  if (!longer.starts_with(shorter)) return false;
  if (longer.size() == shorter.size()) return true;
  const char next = longer[shorter.size()];
  return next == '/' || next == '?' || next == '#';
}

bool links_to(const DocumentRecord& from, const DocumentRecord& to) {
  auto mentions = [&](const std::vector<std::string>& links) {
    for (const auto& l : links) {
      if (l == to.doc_id || (!to.url.empty() && l == to.url)) return true;
    }
    return false;
  };
  return mentions(from.outlinks) || mentions(from.inlinks);
}

}  // namespace

std::string_view channel_name(DiversityChannel channel) {
  return kChannelNames[static_cast<std::size_t>(channel)];
}

std::optional<DiversityChannel> parse_channel(std::string_view name) {
  for (std::size_t i = 0; i < kNumDiversityChannels; ++i) {
    if (kChannelNames[i] == name) return static_cast<DiversityChannel>(i);
  }
  return std::nullopt;
}

std::vector<DiversityChannel> all_channels() {
  std::vector<DiversityChannel> out;
  for (std::size_t i = 0; i < kNumDiversityChannels; ++i) {
    out.push_back(static_cast<DiversityChannel>(i));
  }
  return out;
}

double cosine_dissim(const SparseVector& a, const SparseVector& b) {
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [t, v] : a) na += v * v;
  for (const auto& [t, v] : b) nb += v * v;
  if (na <= 0.0 || nb <= 0.0) return 1.0;
  double num = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      num += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(1.0 - num / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double cosine_dissim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("vectors differ in length");
  const double na = dot(a, a);
  const double nb = dot(b, b);
  if (na <= 0.0 || nb <= 0.0) return 1.0;
  return std::clamp(1.0 - dot(a, b) / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::vector<SparseVector> tfidf_vectors(std::span<const TermCounts* const> docs) {
  std::map<std::string_view, std::pair<std::uint32_t, std::size_t>> vocab;  // id, df
  for (const TermCounts* tc : docs) {
    for (const auto& [term, count] : *tc) {
      if (count > 0.0) ++vocab[term].second;
    }
  }
  std::uint32_t next = 0;
  for (auto& [term, entry] : vocab) entry.first = next++;

  const double n = static_cast<double>(docs.size());
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const TermCounts* tc : docs) {
    SparseVector v;
    for (const auto& [term, count] : *tc) {
      if (count <= 0.0) continue;
      const auto& [id, df] = vocab.at(term);
      const double idf = std::log((n + 1.0) / (static_cast<double>(df) + 1.0)) + 1.0;
      v.emplace_back(id, count * idf);
    }
    std::sort(v.begin(), v.end());
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> parse_category_path(std::string_view path) {
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > start) segments.emplace_back(path.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return segments;
}

double category_distance(std::span<const std::string> u, std::span<const std::string> v) {
  const std::size_t longest = std::max(u.size(), v.size());
  if (longest == 0) return 0.0;
  std::size_t common = 0;
  while (common < u.size() && common < v.size() && u[common] == v[common]) ++common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(longest);
}

double odp_distance(std::span<const std::vector<std::string>> cats_i,
                    std::span<const std::vector<std::string>> cats_j) {
  if (cats_i.empty() || cats_j.empty()) return 0.5;
  double total = 0.0;
  for (const auto& u : cats_i) {
    for (const auto& v : cats_j) total += category_distance(u, v);
  }
  return total / (static_cast<double>(cats_i.size()) * static_cast<double>(cats_j.size()));
}

double link_dissim(const DocumentRecord& a, const DocumentRecord& b) {
  return links_to(a, b) || links_to(b, a) ? 0.0 : 1.0;
}

double url_dissim(std::string_view url_i, std::string_view url_j) {
  const auto a = parse_url(url_i);
  const auto b = parse_url(url_j);
  if (!a || !b) return 1.0;
  if (is_path_prefix(a->full, b->full) || is_path_prefix(b->full, a->full)) return 0.0;
  if (a->host == b->host) return 0.5;
  if (domain_of_host(a->host) == domain_of_host(b->host)) return 0.5;
  return 1.0;
}

std::string registered_domain(std::string_view url) {
  const auto parsed = parse_url(url);
  return parsed ? domain_of_host(parsed->host) : std::string{};
}

Corpus text_corpus(std::span<const DocumentRecord* const> docs) {
  std::map<std::string, std::uint32_t> vocab;
  for (const DocumentRecord* d : docs) {
    for (const auto& field : d->fields) {
      for (const auto& [term, count] : field) {
        if (count > 0.0) vocab.emplace(term, 0);
      }
    }
  }
  std::uint32_t next = 0;
  for (auto& [term, id] : vocab) id = next++;

  Corpus corpus;
  corpus.vocab_size = vocab.size();
  corpus.docs.reserve(docs.size());
  for (const DocumentRecord* d : docs) {
    std::map<std::uint32_t, double> merged;
    for (const auto& field : d->fields) {
      for (const auto& [term, count] : field) {
        if (count > 0.0) merged[vocab.at(term)] += count;
      }
    }
    corpus.docs.emplace_back(merged.begin(), merged.end());
  }
  return corpus;
}

double channel_value(DiversityChannel channel, const DocumentRecord& a,
                     const DocumentRecord& b, std::span<const double> topic_a,
                     std::span<const double> topic_b, const SparseVector* tfidf_a,
                     const SparseVector* tfidf_b) {
  switch (channel) {
    case DiversityChannel::kTopic:
      return topic_distance(topic_a, topic_b);
    case DiversityChannel::kText:
    case DiversityChannel::kTitle:
    case DiversityChannel::kAnchor:
      if (tfidf_a == nullptr || tfidf_b == nullptr) return 1.0;
      return cosine_dissim(*tfidf_a, *tfidf_b);
    case DiversityChannel::kOdp:
      return odp_distance(a.categories, b.categories);
    case DiversityChannel::kLink:
      return link_dissim(a, b);
    case DiversityChannel::kUrl:
      return url_dissim(a.url, b.url);
  }
  return 0.0;
}

void sparsify_and_normalize(PairwiseTensor& tensor, std::size_t top_t) {
  const std::size_t n = tensor.num_docs();
  const std::size_t channels = tensor.num_channels();
  if (n == 0) return;
  std::vector<std::uint8_t> keep(n * n);
  std::vector<DocIndex> order;
  for (std::size_t f = 0; f < channels; ++f) {
    std::fill(keep.begin(), keep.end(), 0);
    for (DocIndex i = 0; i < n; ++i) {
      order.clear();
      for (DocIndex j = 0; j < n; ++j) {
        if (j != i) order.push_back(j);
      }
      if (order.size() > top_t) {
        std::stable_sort(order.begin(), order.end(), [&](DocIndex x, DocIndex y) {
          return tensor.at(i, x, f) > tensor.at(i, y, f);
        });
        order.resize(top_t);
      }
      for (DocIndex j : order) {
        keep[i * n + j] = 1;
        keep[j * n + i] = 1;
      }
    }
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (DocIndex i = 0; i < n; ++i) {
      tensor.set(i, i, f, 0.0);
      for (DocIndex j = i + 1; j < n; ++j) {
        const double v = keep[i * n + j] ? tensor.at(i, j, f) : 0.0;
        tensor.set(i, j, f, v);
        lo = first ? v : std::min(lo, v);
        hi = first ? v : std::max(hi, v);
        first = false;
      }
    }
    const double range = hi - lo;
    for (DocIndex i = 0; i < n; ++i) {
      for (DocIndex j = i + 1; j < n; ++j) {
        const double v = range > 0.0 ? (tensor.at(i, j, f) - lo) / range : 0.0;
        tensor.set(i, j, f, std::clamp(v, 0.0, 1.0));
      }
    }
  }
}

PairwiseTensor assemble_pairwise(std::span<const DocumentRecord> docs,
                                 const DenseMatrix* topics, const PairwiseConfig& config) {
  const std::size_t n = docs.size();
  const auto& channels = config.channels;
  const bool want_topic =
      std::find(channels.begin(), channels.end(), DiversityChannel::kTopic) != channels.end();
  if (want_topic && (topics == nullptr || topics->rows() != n)) {
    throw InvalidArgument(
        fmt::format("topic channel needs one topic row per document ({} docs)", n));
  }

  std::array<std::vector<SparseVector>, kNumTextFields> tfidf;
  for (std::size_t fi = 0; fi < kNumTextFields; ++fi) {
    std::vector<const TermCounts*> field_docs;
    for (const auto& d : docs) field_docs.push_back(&d.fields[fi]);
    tfidf[fi] = tfidf_vectors(field_docs);
  }
  auto field_for = [](DiversityChannel c) -> std::optional<std::size_t> {
    switch (c) {
      case DiversityChannel::kText:
        return static_cast<std::size_t>(TextField::kBody);
      case DiversityChannel::kTitle:
        return static_cast<std::size_t>(TextField::kTitle);
      case DiversityChannel::kAnchor:
        return static_cast<std::size_t>(TextField::kAnchor);
      default:
        return std::nullopt;
    }
  };

  PairwiseTensor tensor(n, channels.size());
  for (std::size_t f = 0; f < channels.size(); ++f) {
    const auto field = field_for(channels[f]);
    for (DocIndex i = 0; i < n; ++i) {
      for (DocIndex j = i + 1; j < n; ++j) {
        std::span<const double> ti;
        std::span<const double> tj;
        if (want_topic) {
          ti = topics->row(i);
          tj = topics->row(j);
        }
        const SparseVector* vi = field ? &tfidf[*field][i] : nullptr;
        const SparseVector* vj = field ? &tfidf[*field][j] : nullptr;
        tensor.set(i, j, f, channel_value(channels[f], docs[i], docs[j], ti, tj, vi, vj));
      }
    }
  }
  sparsify_and_normalize(tensor, config.top_t);
  return tensor;
}

}  // namespace divrank
