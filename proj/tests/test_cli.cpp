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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "divrank/cli.hpp"
#include "divrank/io.hpp"
#include "doctest.h"

using namespace divrank;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const char* env = std::getenv("DIVRANK_TEST_TMP");
  fs::path dir = (env != nullptr ? fs::path(env) : fs::temp_directory_path() / "divrank_test_cli") /
                 name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

// Mean row of a report: column values by header name.
std::map<std::string, double> report_means(const fs::path& path) {
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> names;
  std::istringstream hs(header);
  for (std::string h; std::getline(hs, h, '\t');) names.push_back(h);
  std::string line;
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    if (line.rfind("all\t", 0) != 0) continue;
    std::istringstream ls(line);
    std::size_t col = 0;
    for (std::string v; std::getline(ls, v, '\t'); ++col) {
      if (col >= 2) out[names[col]] = std::stod(v);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("targets evaluate to one") {
  const auto dir = scratch_dir("targets");
  const auto data = (dir / "d.jsonl").string();
  REQUIRE(cli({"synth", "--out", data, "--queries", "12", "--docs", "15"}).status == 0);
  const std::pair<const char*, const char*> measures[] = {
      {"err-ia", "err_ia"}, {"alpha-ndcg", "alpha_ndcg"}, {"nrbp", "nrbp"}};
  for (const auto& [flag, column] : measures) {
    const auto run = (dir / "t.run").string();
    const auto report = dir / "t.tsv";
    REQUIRE(cli({"build-targets", "--data", data, "--out", (dir / "t.jsonl").string(),
                 "--run-out", run, "--measure", flag})
                .status == 0);
    REQUIRE(cli({"evaluate", "--data", data, "--run", run, "--out", report.string()}).status ==
            0);
    CHECK(report_means(report).at(column) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("end-to-end pipeline beats relevance-only ranking") {
  const auto dir = scratch_dir("pipeline");
  auto path = [&](const char* name) { return (dir / name).string(); };
  REQUIRE(cli({"synth", "--out", path("d.jsonl")}).status == 0);
  REQUIRE(cli({"build-targets", "--data", path("d.jsonl"), "--split", "train", "--out",
               path("t.jsonl")})
              .status == 0);
  const auto train = cli({"train", "--data", path("d.jsonl"), "--split", "train", "--targets",
                          path("t.jsonl"), "--model", path("m.json"), "--log", path("log")});
  REQUIRE_MESSAGE(train.status == 0, train.err);
  REQUIRE(cli({"predict", "--data", path("d.jsonl"), "--split", "test", "--model",
               path("m.json"), "--out", path("learned.run")})
              .status == 0);
  REQUIRE(cli({"evaluate", "--data", path("d.jsonl"), "--split", "test", "--run",
               path("learned.run"), "--out", path("learned.tsv")})
              .status == 0);
  REQUIRE(cli({"baseline", "--data", path("d.jsonl"), "--split", "test", "--method",
               "relevance", "--out", path("rel.run")})
              .status == 0);
  REQUIRE(cli({"evaluate", "--data", path("d.jsonl"), "--split", "test", "--run",
               path("rel.run"), "--out", path("rel.tsv")})
              .status == 0);
  const double learned = report_means(dir / "learned.tsv").at("err_ia");
  const double relevance = report_means(dir / "rel.tsv").at("err_ia");
  MESSAGE("mean ERR-IA@20: learned " << learned << ", relevance-only " << relevance);
  CHECK(learned > relevance);

  // The training log has one JSON record per outer iteration.
  std::ifstream log(path("log"));
  std::string first;
  std::getline(log, first);
  CHECK(first.find("\"objective\"") != std::string::npos);

  const auto mmr = cli({"baseline", "--data", path("d.jsonl"), "--split", "test", "--method",
                        "mmr", "--out", path("mmr.run")});
  CHECK(mmr.status == 0);
  CHECK(mmr.out.find("lambda") != std::string::npos);
}

TEST_CASE("sweep over C") {
  const auto dir = scratch_dir("sweep");
  auto path = [&](const char* name) { return (dir / name).string(); };
  REQUIRE(cli({"synth", "--out", path("d.jsonl"), "--queries", "15", "--docs", "12"}).status ==
          0);
  const auto r = cli({"sweep-c", "--data", path("d.jsonl"), "--grid", "0.1,10", "--out",
                      path("sweep.tsv"), "--model-out", path("best.json"), "--cutoff", "5"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  std::ifstream in(path("sweep.tsv"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);
  CHECK(fs::exists(path("best.json")));
}

TEST_CASE("feature extraction fills the pairwise tensor") {
  const auto dir = scratch_dir("features");
  const auto data = dir / "raw.jsonl";
  {
    std::ofstream out(data);
    out << R"({"format":"divrank-dataset","version":1,"R":1,"F":0,"channels":[]})" << '\n'
        << R"({"query_id":"q","num_subtopics":1,"rel":[[1,0,1]],"docs":[)"
        << R"({"id":"a","rel":[1],"url":"a.com/x","categories":["Arts/Movies"],)"
        << R"("fields":{"body":{"red":2,"fish":1},"title":{"red":1}}},)"
        << R"({"id":"b","rel":[0],"url":"a.com/x/y","outlinks":["a"],)"
        << R"("fields":{"body":{"red":1}}},)"
        << R"({"id":"c","rel":[0.5],"url":"c.org","categories":["Science"],)"
        << R"("fields":{"body":{"blue":3},"anchor":{"sea":1}}}]})" << '\n';
  }
  const auto out = (dir / "features.jsonl").string();
  const auto r = cli({"feature-extract", "--data", data.string(), "--out", out, "--topics", "2"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const auto ds = load_dataset(out);
  CHECK(ds.manifest.channels ==
        std::vector<std::string>{"topic", "text", "title", "anchor", "odp", "link", "url"});
  const auto& q = ds.queries[0];
  CHECK(validate_instance(q, 1).ok());
  CHECK(q.pairwise.at(0, 1, 5) == 0.0);  // linked
  CHECK(q.pairwise.at(0, 2, 5) == 1.0);
  CHECK(q.pairwise.at(0, 1, 6) == 0.0);  // URL prefix

  const auto per_query = (dir / "per_query.jsonl").string();
  CHECK(cli({"feature-extract", "--data", data.string(), "--out", per_query, "--topics", "2",
             "--plsa-scope", "query", "--channels", "topic,url"})
            .status == 0);
  CHECK(load_dataset(per_query).manifest.channels == std::vector<std::string>{"topic", "url"});
}

TEST_CASE("failures print one machine-readable line and leave no output") {
  const auto dir = scratch_dir("errors");
  auto path = [&](const char* name) { return (dir / name).string(); };
  REQUIRE(cli({"synth", "--out", path("d.jsonl"), "--queries", "6", "--docs", "8"}).status == 0);
  REQUIRE(cli({"synth", "--out", path("other.jsonl"), "--queries", "6", "--docs", "8",
               "--rel-dim", "3"})
              .status == 0);
  REQUIRE(cli({"train", "--data", path("d.jsonl"), "--model", path("m.json")}).status == 0);

  const auto bad = cli({"predict", "--data", path("other.jsonl"), "--model", path("m.json"),
                        "--out", path("p.run")});
  CHECK(bad.status != 0);
  CHECK(bad.err.rfind("error: kind=compatibility message=\"", 0) == 0);
  CHECK(std::count(bad.err.begin(), bad.err.end(), '\n') == 1);
  CHECK_FALSE(fs::exists(path("p.run")));

  const auto missing = cli({"evaluate", "--data", path("nope.jsonl"), "--run", path("x.run")});
  CHECK(missing.status != 0);
  CHECK(missing.err.rfind("error: kind=", 0) == 0);

  const auto usage = cli({"train", "--data", path("d.jsonl")});
  CHECK(usage.status != 0);
  CHECK(usage.err.rfind("error: kind=usage", 0) == 0);

  const auto range = cli({"evaluate", "--data", path("d.jsonl"), "--run", path("x.run"),
                          "--alpha", "0"});
  CHECK(range.status != 0);

  const auto none = cli({});
  CHECK(none.status != 0);
}

TEST_CASE("thread count does not change results") {
  const auto dir = scratch_dir("threads");
  auto path = [&](const std::string& name) { return (dir / name).string(); };
  REQUIRE(cli({"synth", "--out", path("d.jsonl"), "--queries", "20", "--docs", "15"}).status ==
          0);
  for (const char* threads : {"1", "4"}) {
    const std::string t = threads;
    REQUIRE(cli({"--threads", t, "train", "--data", path("d.jsonl"), "--split", "train",
                 "--model", path("m" + t + ".json"), "--sweep-mode", "batched"})
                .status == 0);
    REQUIRE(cli({"--threads", t, "predict", "--data", path("d.jsonl"), "--model",
                 path("m" + t + ".json"), "--out", path("p" + t + ".run")})
                .status == 0);
  }
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  CHECK(slurp(path("m1.json")) == slurp(path("m4.json")));
  CHECK(slurp(path("p1.run")) == slurp(path("p4.run")));
}
