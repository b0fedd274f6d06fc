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
// File formats.
//
// Dataset: JSON lines. Line 1 is the manifest
//
//   {"format":"divrank-dataset","version":1,"R":8,"F":7,"channels":[...]}
//
// and every following line is one query:
//
//   {"query_id":"q1","split":"train",
//    "docs":[{"id":"d1","rel":[...],"url":"...","categories":["A/B"],
//             "inlinks":[...],"outlinks":[...],
//             "fields":{"body":{"term":2},"title":{...},"anchor":{...}}}, ...],
//    "pairwise":[[i,j,channel,value], ...],       // i < j, zero entries omitted
//    "num_subtopics":M,"probs":[...],"rel":[[0,1,...], ...]}   // rel is M x n
//
// Only query_id, docs[].id, docs[].rel, num_subtopics and rel are required.
//
// Diversity qrels: "topic subtopic docid judgment" per line.
// Run file: "query_id rank doc_id score" per line, rank 1-based.
// Model: one JSON object with weights and metadata.
//

#ifndef DIVRANK_IO_HPP_
#define DIVRANK_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divrank/core.hpp"
#include "divrank/trainer.hpp"

namespace divrank {

inline constexpr int kDatasetVersion = 1;

struct DatasetManifest {
  int version = kDatasetVersion;
  std::size_t rel_dim = 0;
  std::vector<std::string> channels;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<QueryInstance> queries;
  // Optional per-query split label ("train", "val", "test"); empty if unset.
  std::vector<std::string> splits;
};

Dataset parse_dataset(std::istream& in, std::string_view source = "<stream>");
Dataset load_dataset(const std::string& path);
void write_dataset(std::ostream& out, const Dataset& ds);
void save_dataset(const std::string& path, const Dataset& ds);

// Queries whose split label equals split, or all queries when split is empty
// or "all". Throws InvalidArgument when a split is requested and no query
// carries that label.
std::vector<QueryInstance> select_split(const Dataset& ds, std::string_view split);

// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

// ---- Diversity qrels ----

struct TopicQrels {
  // Subtopic numbers with at least one line, ascending. Row i of the
  // judgments corresponds to subtopics[i].
  std::vector<int> subtopics;
  // doc_id -> indices into subtopics of relevant (judgment > 0) entries.
  std::map<std::string, std::set<std::size_t>> relevant;
};

std::map<std::string, TopicQrels> parse_diversity_qrels(std::istream& in);
std::map<std::string, TopicQrels> load_diversity_qrels(const std::string& path);

// Judgments over the given documents with uniform subtopic probabilities;
// documents absent from the qrels get all-zero columns.
SubtopicJudgments align_judgments(const TopicQrels& qrels,
                                  std::span<const std::string> doc_ids);

// ---- Model ----

struct ModelMetadata {
  MeasureParams measure;
  std::vector<std::string> channels;
  TrainConfig train;
  std::string dataset_hash;
  std::size_t outer_iterations = 0;
  bool truncated = false;
};

struct Model {
  WeightVector w;
  ModelMetadata meta;
};

void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

// Throws CompatibilityError when the weight dimensions or channel names
// disagree with the dataset manifest.
void check_compatibility(const Model& model, const DatasetManifest& manifest);

// ---- Run files ----

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
};

// query_id -> entries ordered by rank. Query order is preserved in
// run_order when given.
struct Run {
  std::vector<std::string> query_order;
  std::map<std::string, std::vector<RunEntry>> entries;
};

void write_run(std::ostream& out, const Run& run);
void save_run(const std::string& path, const Run& run);
Run parse_run(std::istream& in);
Run load_run(const std::string& path);

// Converts run entries to document indices of q. Throws InvalidRanking for
// unknown or repeated document ids.
Ranking run_to_ranking(const QueryInstance& q, std::span<const RunEntry> entries);

// ---- Reports ----

struct EvalRow {
  std::string query_id;
  std::string status;  // "ok", "skipped" (no relevant document) or "missing"
  double err_ia = 0.0;
  double alpha_ndcg = 0.0;
  double nrbp = 0.0;
  double precision_ia = 0.0;
  double subtopic_recall = 0.0;
};

// Tab-separated with a header row; the last row, query_id "all", holds the
// means over "ok" rows.
void write_report(std::ostream& out, std::span<const EvalRow> rows);
EvalRow mean_row(std::span<const EvalRow> rows);

// Writes through a temporary file in the same directory and renames it over
// path on success; on failure the temporary is removed and nothing is left
// behind.
void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer);

std::string format_real(double value);

}  // namespace divrank

#endif  // DIVRANK_IO_HPP_
