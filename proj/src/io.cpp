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

#include "divrank/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "divrank/error.hpp"
#include "divrank/features.hpp"
#include "json.hpp"

namespace divrank {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::string_view kDatasetFormat = "divrank-dataset";
constexpr std::string_view kModelFormat = "divrank-model";
constexpr int kModelVersion = 1;

// Locates schema errors: "<source>:<line>: query <id>: field <name>: <what>".
class RecordContext {
 public:
  RecordContext(std::string_view source, std::size_t line)
      : source_(source), line_(line) {}
  void set_query(std::string id) { query_ = std::move(id); }

  [[noreturn]] void fail(std::string_view field, std::string_view what) const {
    std::string where = fmt::format("{}:{}", source_, line_);
    if (!query_.empty()) where += fmt::format(": query {}", query_);
    throw SchemaError(fmt::format("{}: field {}: {}", where, field, what));
  }

  const json& require(const json& obj, const char* key) const {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(key, "missing");
    return *it;
  }

  void only_keys(const json& obj, std::string_view field,
                 std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(field, fmt::format("unknown key '{}'", key));
      }
    }
  }

  std::string string(const json& v, std::string_view field) const {
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

  double real(const json& v, std::string_view field) const {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  std::size_t count(const json& v, std::string_view field) const {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(field, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  const json& array(const json& v, std::string_view field) const {
    if (!v.is_array()) fail(field, "expected an array");
    return v;
  }

  std::vector<std::string> strings(const json& v, std::string_view field) const {
    std::vector<std::string> out;
    for (const auto& e : array(v, field)) out.push_back(string(e, field));
    return out;
  }

 private:
  std::string_view source_;
  std::size_t line_;
  std::string query_;
};

json parse_line(const std::string& line, std::string_view source, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}:{}: {}", source, line_no, e.what()), line_no);
  }
}

DatasetManifest parse_manifest(const json& j, const RecordContext& ctx) {
  if (!j.is_object()) ctx.fail("manifest", "expected an object");
  ctx.only_keys(j, "manifest", {"format", "version", "R", "F", "channels"});
  if (ctx.string(ctx.require(j, "format"), "format") != kDatasetFormat) {
    ctx.fail("format", fmt::format("expected \"{}\"", kDatasetFormat));
  }
  DatasetManifest m;
  const json& version = ctx.require(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kDatasetVersion) {
    ctx.fail("version", fmt::format("unsupported version (expected {})", kDatasetVersion));
  }
  m.rel_dim = ctx.count(ctx.require(j, "R"), "R");
  const std::size_t f = ctx.count(ctx.require(j, "F"), "F");
  m.channels = ctx.strings(ctx.require(j, "channels"), "channels");
  if (m.channels.size() != f) ctx.fail("channels", "length differs from F");
  return m;
}

TermCounts parse_terms(const json& v, std::string_view field, const RecordContext& ctx) {
  if (!v.is_object()) ctx.fail(field, "expected an object of term counts");
  TermCounts out;
  for (const auto& [term, count] : v.items()) {
    const double c = ctx.real(count, field);
    if (!(c >= 0.0)) ctx.fail(field, fmt::format("negative count for '{}'", term));
    out[term] = c;
  }
  return out;
}

DocumentRecord parse_doc(const json& v, std::size_t index, const DatasetManifest& m,
                         const RecordContext& ctx) {
  const std::string field = fmt::format("docs[{}]", index);
  if (!v.is_object()) ctx.fail(field, "expected an object");
  ctx.only_keys(v, field,
                {"id", "rel", "url", "categories", "inlinks", "outlinks", "fields"});
  DocumentRecord d;
  d.doc_id = ctx.string(ctx.require(v, "id"), field + ".id");
  for (const auto& x : ctx.array(ctx.require(v, "rel"), field + ".rel")) {
    d.relevance_features.push_back(ctx.real(x, field + ".rel"));
  }
  if (d.relevance_features.size() != m.rel_dim) {
    ctx.fail(field + ".rel", fmt::format("length {} does not match R = {}",
                                         d.relevance_features.size(), m.rel_dim));
  }
  if (auto it = v.find("url"); it != v.end()) d.url = ctx.string(*it, field + ".url");
  if (auto it = v.find("categories"); it != v.end()) {
    for (const auto& path : ctx.strings(*it, field + ".categories")) {
      d.categories.push_back(parse_category_path(path));
    }
  }
  if (auto it = v.find("inlinks"); it != v.end()) {
    d.inlinks = ctx.strings(*it, field + ".inlinks");
  }
  if (auto it = v.find("outlinks"); it != v.end()) {
    d.outlinks = ctx.strings(*it, field + ".outlinks");
  }
  if (auto it = v.find("fields"); it != v.end()) {
    if (!it->is_object()) ctx.fail(field + ".fields", "expected an object");
    for (const auto& [name, terms] : it->items()) {
      bool known = false;
      for (std::size_t f = 0; f < kNumTextFields; ++f) {
        if (name == field_name(static_cast<TextField>(f))) {
          d.fields[f] = parse_terms(terms, field + ".fields." + name, ctx);
          known = true;
        }
      }
      if (!known) ctx.fail(field + ".fields", fmt::format("unknown text field '{}'", name));
    }
  }
  return d;
}

QueryInstance parse_query(const json& j, const DatasetManifest& m, RecordContext& ctx,
                          std::string* split) {
  if (!j.is_object()) ctx.fail("record", "expected an object");
  QueryInstance q;
  q.query_id = ctx.string(ctx.require(j, "query_id"), "query_id");
  ctx.set_query(q.query_id);
  ctx.only_keys(j, "record",
                {"query_id", "split", "docs", "pairwise", "num_subtopics", "probs", "rel"});
  if (auto it = j.find("split"); it != j.end()) *split = ctx.string(*it, "split");

  const json& docs = ctx.array(ctx.require(j, "docs"), "docs");
  for (std::size_t i = 0; i < docs.size(); ++i) q.docs.push_back(parse_doc(docs[i], i, m, ctx));
  {
    std::set<std::string> seen;
    for (const auto& d : q.docs) {
      if (!seen.insert(d.doc_id).second) ctx.fail("docs", fmt::format("duplicate id '{}'", d.doc_id));
    }
  }
  const std::size_t n = q.docs.size();
  const std::size_t f = m.channels.size();

  q.pairwise = PairwiseTensor(n, f);
  if (auto it = j.find("pairwise"); it != j.end()) {
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
    for (const auto& e : ctx.array(*it, "pairwise")) {
      if (!e.is_array() || e.size() != 4) ctx.fail("pairwise", "entries must be [i, j, channel, value]");
      const std::size_t a = ctx.count(e[0], "pairwise");
      const std::size_t b = ctx.count(e[1], "pairwise");
      const std::size_t c = ctx.count(e[2], "pairwise");
      const double v = ctx.real(e[3], "pairwise");
      if (!(a < b)) ctx.fail("pairwise", fmt::format("entry ({}, {}) must have i < j", a, b));
      if (b >= n) ctx.fail("pairwise", fmt::format("document index {} out of range", b));
      if (c >= f) ctx.fail("pairwise", fmt::format("channel {} out of range (F = {})", c, f));
      if (!seen.insert({a, b, c}).second) {
        ctx.fail("pairwise", fmt::format("duplicate entry ({}, {}, {})", a, b, c));
      }
      q.pairwise.set(a, b, c, v);
    }
  }

  const std::size_t subtopics = ctx.count(ctx.require(j, "num_subtopics"), "num_subtopics");
  if (subtopics == 0) ctx.fail("num_subtopics", "must be at least 1");
  q.judgments = SubtopicJudgments::uniform(subtopics, n);
  if (auto it = j.find("probs"); it != j.end()) {
    q.judgments.probs.clear();
    for (const auto& x : ctx.array(*it, "probs")) q.judgments.probs.push_back(ctx.real(x, "probs"));
    if (q.judgments.probs.size() != subtopics) ctx.fail("probs", "length differs from num_subtopics");
  }
  const json& rel = ctx.array(ctx.require(j, "rel"), "rel");
  if (rel.size() != subtopics) ctx.fail("rel", "row count differs from num_subtopics");
  for (std::size_t s = 0; s < subtopics; ++s) {
    const json& row = ctx.array(rel[s], "rel");
    if (row.size() != n) ctx.fail("rel", fmt::format("row {} length differs from docs", s));
    for (std::size_t d = 0; d < n; ++d) {
      if (!row[d].is_number_integer()) ctx.fail("rel", "entries must be 0 or 1");
      const auto g = row[d].get<std::int64_t>();
      if (g != 0 && g != 1) ctx.fail("rel", "entries must be 0 or 1");
      q.judgments.set_relevant(s, d, g == 1);
    }
  }

  const ValidationReport report = validate_instance(q, m.rel_dim);
  if (!report.ok()) ctx.fail("instance", report.errors.front());
  return q;
}

ojson doc_json(const DocumentRecord& d) {
  ojson out;
  out["id"] = d.doc_id;
  out["rel"] = d.relevance_features;
  if (!d.url.empty()) out["url"] = d.url;
  if (!d.categories.empty()) {
    ojson cats = ojson::array();
    for (const auto& path : d.categories) {
      std::string joined;
      for (std::size_t s = 0; s < path.size(); ++s) {
        if (s > 0) joined += '/';
        joined += path[s];
      }
      cats.push_back(joined);
    }
    out["categories"] = std::move(cats);
  }
  if (!d.inlinks.empty()) out["inlinks"] = d.inlinks;
  if (!d.outlinks.empty()) out["outlinks"] = d.outlinks;
  ojson fields = ojson::object();
  for (std::size_t f = 0; f < kNumTextFields; ++f) {
    if (d.fields[f].empty()) continue;
    ojson terms = ojson::object();
    for (const auto& [term, count] : d.fields[f]) terms[term] = count;
    fields[std::string(field_name(static_cast<TextField>(f)))] = std::move(terms);
  }
  if (!fields.empty()) out["fields"] = std::move(fields);
  return out;
}

ojson query_json(const QueryInstance& q, const std::string& split) {
  ojson out;
  out["query_id"] = q.query_id;
  if (!split.empty()) out["split"] = split;
  ojson docs = ojson::array();
  for (const auto& d : q.docs) docs.push_back(doc_json(d));
  out["docs"] = std::move(docs);
  ojson pairs = ojson::array();
  const std::size_t n = q.num_docs();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t c = 0; c < q.pairwise.num_channels(); ++c) {
        const double v = q.pairwise.at(i, j, c);
        if (v != 0.0) pairs.push_back(ojson::array({i, j, c, v}));
      }
    }
  }
  out["pairwise"] = std::move(pairs);
  const auto& jd = q.judgments;
  out["num_subtopics"] = jd.num_subtopics;
  out["probs"] = jd.probs;
  ojson rel = ojson::array();
  for (std::size_t s = 0; s < jd.num_subtopics; ++s) {
    ojson row = ojson::array();
    for (std::size_t d = 0; d < jd.num_docs; ++d) row.push_back(jd.relevant(s, d) ? 1 : 0);
    rel.push_back(std::move(row));
  }
  out["rel"] = std::move(rel);
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path));
  return in;
}

// Splits a line on whitespace.
std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  return {std::istream_iterator<std::string>(ss), std::istream_iterator<std::string>()};
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

double parse_real(const std::string& s, std::size_t line_no, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ParseError(fmt::format("line {}: invalid {} '{}'", line_no, what, s), line_no);
  }
  return v;
}

long long parse_int(const std::string& s, std::size_t line_no, std::string_view what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ParseError(fmt::format("line {}: invalid {} '{}'", line_no, what, s), line_no);
  }
  return v;
}

ojson measure_json(const MeasureParams& p) {
  ojson out;
  out["measure"] = std::string(measure_name(p.measure));
  out["alpha"] = p.alpha;
  out["beta"] = p.beta;
  out["cutoff"] = p.cutoff;
  return out;
}

MeasureParams measure_from_json(const json& j, const RecordContext& ctx) {
  MeasureParams p;
  try {
    p.measure = parse_measure(ctx.string(ctx.require(j, "measure"), "measure.measure"));
  } catch (const InvalidArgument& e) {
    ctx.fail("measure.measure", e.what());
  }
  p.alpha = ctx.real(ctx.require(j, "alpha"), "measure.alpha");
  p.beta = ctx.real(ctx.require(j, "beta"), "measure.beta");
  p.cutoff = ctx.count(ctx.require(j, "cutoff"), "measure.cutoff");
  return p;
}

}  // namespace

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

Dataset parse_dataset(std::istream& in, std::string_view source) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  bool have_manifest = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    RecordContext ctx(source, line_no);
    const json j = parse_line(line, source, line_no);
    if (!have_manifest) {
      ds.manifest = parse_manifest(j, ctx);
      have_manifest = true;
      continue;
    }
    std::string split;
    QueryInstance q = parse_query(j, ds.manifest, ctx, &split);
    if (!ids.insert(q.query_id).second) ctx.fail("query_id", "duplicate query id");
    ds.queries.push_back(std::move(q));
    ds.splits.push_back(std::move(split));
  }
  if (!have_manifest) throw SchemaError(fmt::format("{}: missing manifest line", source));
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in = open_input(path);
  return parse_dataset(in, path);
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  ojson manifest;
  manifest["format"] = kDatasetFormat;
  manifest["version"] = ds.manifest.version;
  manifest["R"] = ds.manifest.rel_dim;
  manifest["F"] = ds.manifest.channels.size();
  manifest["channels"] = ds.manifest.channels;
  out << manifest.dump() << '\n';
  for (std::size_t i = 0; i < ds.queries.size(); ++i) {
    const std::string& split = i < ds.splits.size() ? ds.splits[i] : std::string();
    out << query_json(ds.queries[i], split).dump() << '\n';
  }
}

void save_dataset(const std::string& path, const Dataset& ds) {
  write_file_atomic(path, [&](std::ostream& out) { write_dataset(out, ds); });
}

std::vector<QueryInstance> select_split(const Dataset& ds, std::string_view split) {
  if (split.empty() || split == "all") return ds.queries;
  std::vector<QueryInstance> out;
  for (std::size_t i = 0; i < ds.queries.size(); ++i) {
    if (i < ds.splits.size() && ds.splits[i] == split) out.push_back(ds.queries[i]);
  }
  if (out.empty()) throw InvalidArgument(fmt::format("no queries in split '{}'", split));
  return out;
}

std::string file_hash(const std::string& path) {
  std::ifstream in = open_input(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

std::map<std::string, TopicQrels> parse_diversity_qrels(std::istream& in) {
  struct Raw {
    std::set<int> subtopics;
    std::vector<std::tuple<int, std::string, bool>> lines;
  };
  std::map<std::string, Raw> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto t = tokens(line);
    if (t.size() != 4) {
      throw ParseError(
          fmt::format("line {}: expected 'topic subtopic docid judgment', got {} fields",
                      line_no, t.size()),
          line_no);
    }
    const long long subtopic = parse_int(t[1], line_no, "subtopic");
    const long long judgment = parse_int(t[3], line_no, "judgment");
    if (subtopic < 0) {
      throw ParseError(fmt::format("line {}: negative subtopic", line_no), line_no);
    }
    if (subtopic == 0) continue;  // topic-level line
    auto& r = raw[t[0]];
    r.subtopics.insert(static_cast<int>(subtopic));
    r.lines.emplace_back(static_cast<int>(subtopic), t[2], judgment > 0);
  }
  std::map<std::string, TopicQrels> out;
  for (auto& [topic, r] : raw) {
    TopicQrels& q = out[topic];
    q.subtopics.assign(r.subtopics.begin(), r.subtopics.end());
    for (const auto& [subtopic, doc, relevant] : r.lines) {
      auto& rows = q.relevant[doc];
      if (!relevant) continue;
      const auto pos = std::lower_bound(q.subtopics.begin(), q.subtopics.end(), subtopic);
      rows.insert(static_cast<std::size_t>(pos - q.subtopics.begin()));
    }
  }
  return out;
}

std::map<std::string, TopicQrels> load_diversity_qrels(const std::string& path) {
  std::ifstream in = open_input(path);
  return parse_diversity_qrels(in);
}

SubtopicJudgments align_judgments(const TopicQrels& qrels,
                                  std::span<const std::string> doc_ids) {
  if (qrels.subtopics.empty()) throw InvalidArgument("topic has no subtopics");
  auto j = SubtopicJudgments::uniform(qrels.subtopics.size(), doc_ids.size());
  for (std::size_t d = 0; d < doc_ids.size(); ++d) {
    const auto it = qrels.relevant.find(doc_ids[d]);
    if (it == qrels.relevant.end()) continue;
    for (std::size_t s : it->second) j.set_relevant(s, d, true);
  }
  return j;
}

void save_model(const std::string& path, const Model& model) {
  ojson out;
  out["format"] = kModelFormat;
  out["version"] = kModelVersion;
  out["w_rel"] = model.w.w_rel;
  out["w_div"] = model.w.w_div;
  out["channels"] = model.meta.channels;
  out["measure"] = measure_json(model.meta.measure);
  ojson train;
  train["c"] = model.meta.train.c;
  train["epsilon"] = model.meta.train.epsilon;
  train["max_outer_iters"] = model.meta.train.max_outer_iters;
  train["qp_tol"] = model.meta.train.qp_tol;
  train["prune_after"] = model.meta.train.prune_after;
  train["sweep_mode"] =
      model.meta.train.sweep_mode == SweepMode::kSequential ? "sequential" : "batched";
  train["outer_iterations"] = model.meta.outer_iterations;
  train["truncated"] = model.meta.truncated;
  out["train"] = std::move(train);
  out["dataset_hash"] = model.meta.dataset_hash;
  write_file_atomic(path, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
}

Model load_model(const std::string& path) {
  std::ifstream in = open_input(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()), 0);
  }
  const RecordContext ctx(path, 1);
  if (!j.is_object()) ctx.fail("model", "expected an object");
  if (ctx.string(ctx.require(j, "format"), "format") != kModelFormat) {
    ctx.fail("format", fmt::format("expected \"{}\"", kModelFormat));
  }
  const json& version = ctx.require(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kModelVersion) {
    ctx.fail("version", "unsupported version");
  }
  Model m;
  for (const auto& x : ctx.array(ctx.require(j, "w_rel"), "w_rel")) {
    m.w.w_rel.push_back(ctx.real(x, "w_rel"));
  }
  for (const auto& x : ctx.array(ctx.require(j, "w_div"), "w_div")) {
    m.w.w_div.push_back(ctx.real(x, "w_div"));
  }
  m.meta.channels = ctx.strings(ctx.require(j, "channels"), "channels");
  if (m.meta.channels.size() != m.w.w_div.size()) {
    ctx.fail("channels", "length differs from w_div");
  }
  m.meta.measure = measure_from_json(ctx.require(j, "measure"), ctx);
  if (auto it = j.find("train"); it != j.end()) {
    const json& t = *it;
    if (auto c = t.find("c"); c != t.end()) m.meta.train.c = ctx.real(*c, "train.c");
    if (auto e = t.find("epsilon"); e != t.end()) {
      m.meta.train.epsilon = ctx.real(*e, "train.epsilon");
    }
    if (auto e = t.find("max_outer_iters"); e != t.end()) {
      m.meta.train.max_outer_iters = ctx.count(*e, "train.max_outer_iters");
    }
    if (auto e = t.find("qp_tol"); e != t.end()) m.meta.train.qp_tol = ctx.real(*e, "train.qp_tol");
    if (auto e = t.find("prune_after"); e != t.end()) {
      m.meta.train.prune_after = ctx.count(*e, "train.prune_after");
    }
    if (auto e = t.find("sweep_mode"); e != t.end()) {
      m.meta.train.sweep_mode = ctx.string(*e, "train.sweep_mode") == "batched"
                                    ? SweepMode::kBatched
                                    : SweepMode::kSequential;
    }
    if (auto e = t.find("outer_iterations"); e != t.end()) {
      m.meta.outer_iterations = ctx.count(*e, "train.outer_iterations");
    }
    if (auto e = t.find("truncated"); e != t.end() && e->is_boolean()) {
      m.meta.truncated = e->get<bool>();
    }
  }
  m.meta.train.measure = m.meta.measure;
  if (auto it = j.find("dataset_hash"); it != j.end()) {
    m.meta.dataset_hash = ctx.string(*it, "dataset_hash");
  }
  return m;
}

void check_compatibility(const Model& model, const DatasetManifest& manifest) {
  if (model.w.w_rel.size() != manifest.rel_dim) {
    throw CompatibilityError(fmt::format("model has {} relevance weights, dataset R = {}",
                                         model.w.w_rel.size(), manifest.rel_dim));
  }
  if (model.meta.channels != manifest.channels) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
      return s;
    };
    throw CompatibilityError(fmt::format("model channels [{}] differ from dataset channels [{}]",
                                         join(model.meta.channels), join(manifest.channels)));
  }
}

void write_run(std::ostream& out, const Run& run) {
  std::vector<std::string> order = run.query_order;
  for (const auto& [qid, entries] : run.entries) {
    if (std::find(order.begin(), order.end(), qid) == order.end()) order.push_back(qid);
  }
  for (const auto& qid : order) {
    const auto it = run.entries.find(qid);
    if (it == run.entries.end()) continue;
    for (std::size_t r = 0; r < it->second.size(); ++r) {
      out << qid << ' ' << (r + 1) << ' ' << it->second[r].doc_id << ' '
          << format_real(it->second[r].score) << '\n';
    }
  }
}

void save_run(const std::string& path, const Run& run) {
  write_file_atomic(path, [&](std::ostream& out) { write_run(out, run); });
}

Run parse_run(std::istream& in) {
  std::map<std::string, std::vector<std::pair<long long, RunEntry>>> raw;
  Run run;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto t = tokens(line);
    if (t.size() != 4) {
      throw ParseError(fmt::format("line {}: expected 'query_id rank doc_id score', got {} fields",
                                   line_no, t.size()),
                       line_no);
    }
    const long long rank = parse_int(t[1], line_no, "rank");
    if (rank < 1) throw ParseError(fmt::format("line {}: rank must be >= 1", line_no), line_no);
    const double score = parse_real(t[3], line_no, "score");
    if (!raw.contains(t[0])) run.query_order.push_back(t[0]);
    auto& rows = raw[t[0]];
    for (const auto& [r, e] : rows) {
      if (r == rank) {
        throw ParseError(fmt::format("line {}: duplicate rank {} for query {}", line_no, rank, t[0]),
                         line_no);
      }
    }
    rows.emplace_back(rank, RunEntry{t[2], score});
  }
  for (auto& [qid, rows] : raw) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& entries = run.entries[qid];
    for (auto& [r, e] : rows) entries.push_back(std::move(e));
  }
  return run;
}

Run load_run(const std::string& path) {
  std::ifstream in = open_input(path);
  return parse_run(in);
}

Ranking run_to_ranking(const QueryInstance& q, std::span<const RunEntry> entries) {
  std::unordered_map<std::string, DocIndex> index;
  for (DocIndex d = 0; d < q.num_docs(); ++d) index.emplace(q.docs[d].doc_id, d);
  Ranking out;
  for (const auto& e : entries) {
    const auto it = index.find(e.doc_id);
    if (it == index.end()) {
      throw InvalidRanking(
          fmt::format("query {}: document '{}' is not a candidate", q.query_id, e.doc_id));
    }
    out.push_back(it->second);
  }
  check_ranking(out, q.num_docs(), q.num_docs());
  return out;
}

EvalRow mean_row(std::span<const EvalRow> rows) {
  EvalRow m;
  m.query_id = "all";
  m.status = "mean";
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    m.err_ia += r.err_ia;
    m.alpha_ndcg += r.alpha_ndcg;
    m.nrbp += r.nrbp;
    m.precision_ia += r.precision_ia;
    m.subtopic_recall += r.subtopic_recall;
    ++count;
  }
  if (count > 0) {
    const auto c = static_cast<double>(count);
    m.err_ia /= c;
    m.alpha_ndcg /= c;
    m.nrbp /= c;
    m.precision_ia /= c;
    m.subtopic_recall /= c;
  }
  return m;
}

void write_report(std::ostream& out, std::span<const EvalRow> rows) {
  out << "query_id\tstatus\terr_ia\talpha_ndcg\tnrbp\tprecision_ia\tsubtopic_recall\n";
  auto emit = [&](const EvalRow& r) {
    out << r.query_id << '\t' << r.status << '\t' << format_real(r.err_ia) << '\t'
        << format_real(r.alpha_ndcg) << '\t' << format_real(r.nrbp) << '\t'
        << format_real(r.precision_ia) << '\t' << format_real(r.subtopic_recall) << '\n';
  };
  for (const auto& r : rows) emit(r);
  emit(mean_row(rows));
}

void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
      writer(out);
      out.flush();
      if (!out) throw IoError(fmt::format("write to {} failed", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError(fmt::format("cannot rename {} to {}: {}", tmp.string(), path, ec.message()));
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

}  // namespace divrank
