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

// Python bindings: datasets, measures, training and the command line.

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "divrank/baselines.hpp"
#include "divrank/cli.hpp"
#include "divrank/core.hpp"
#include "divrank/error.hpp"
#include "divrank/features.hpp"
#include "divrank/greedy.hpp"
#include "divrank/io.hpp"
#include "divrank/metrics.hpp"
#include "divrank/model.hpp"
#include "divrank/synth.hpp"
#include "divrank/trainer.hpp"

namespace py = pybind11;
using namespace divrank;

namespace {

std::vector<std::vector<std::string>> paths(const std::vector<std::string>& raw) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : raw) out.push_back(parse_category_path(p));
  return out;
}

SubtopicJudgments judgments_from(const std::vector<std::vector<int>>& rel,
                                 std::vector<double> probs) {
  if (rel.empty()) throw InvalidArgument("rel needs at least one subtopic row");
  const std::size_t n = rel[0].size();
  auto j = SubtopicJudgments::uniform(rel.size(), n);
  if (!probs.empty()) {
    if (probs.size() != rel.size()) throw InvalidArgument("probs and rel rows differ in count");
    j.probs = std::move(probs);
  }
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (rel[i].size() != n) throw InvalidArgument("rel rows differ in length");
    for (std::size_t d = 0; d < n; ++d) j.set_relevant(i, d, rel[i][d] > 0);
  }
  return j;
}

}  // namespace

PYBIND11_MODULE(_divrank, m) {
  m.doc() = "Diversified ranking with structural max-margin training";

  static py::exception<Error> error(m, "DivrankError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::enum_<Measure>(m, "Measure")
      .value("ALPHA_NDCG", Measure::kAlphaNdcg)
      .value("ERR_IA", Measure::kErrIa)
      .value("NRBP", Measure::kNrbp);

  py::class_<MeasureParams>(m, "MeasureParams")
      .def(py::init([](Measure measure, double alpha, double beta, std::size_t cutoff) {
             MeasureParams p{measure, alpha, beta, cutoff};
             p.validate();
             return p;
           }),
           py::arg("measure") = Measure::kErrIa, py::arg("alpha") = 0.5,
           py::arg("beta") = 0.5, py::arg("cutoff") = 20)
      .def_readwrite("measure", &MeasureParams::measure)
      .def_readwrite("alpha", &MeasureParams::alpha)
      .def_readwrite("beta", &MeasureParams::beta)
      .def_readwrite("cutoff", &MeasureParams::cutoff);

  py::class_<WeightVector>(m, "WeightVector")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("w_rel"),
           py::arg("w_div"))
      .def_readwrite("w_rel", &WeightVector::w_rel)
      .def_readwrite("w_div", &WeightVector::w_div);

  py::class_<QueryInstance>(m, "QueryInstance")
      .def_readonly("query_id", &QueryInstance::query_id)
      .def_property_readonly("num_docs", &QueryInstance::num_docs)
      .def_property_readonly("doc_ids", [](const QueryInstance& q) {
        std::vector<std::string> ids;
        for (const auto& d : q.docs) ids.push_back(d.doc_id);
        return ids;
      });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("rel_dim", [](const Dataset& ds) { return ds.manifest.rel_dim; })
      .def_property_readonly("channels", [](const Dataset& ds) { return ds.manifest.channels; })
      .def_readonly("queries", &Dataset::queries)
      .def_readonly("splits", &Dataset::splits)
      .def("split", &select_split, py::arg("name"))
      .def("save", [](const Dataset& ds, const std::string& path) { save_dataset(path, ds); });

  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def(
      "synthesize",
      [](std::size_t queries, std::size_t docs, std::size_t subtopics, double sigma,
         std::uint64_t seed) {
        SynthConfig cfg;
        cfg.num_queries = queries;
        cfg.num_docs = docs;
        cfg.num_subtopics = subtopics;
        cfg.sigma = sigma;
        cfg.seed = seed;
        return generate(cfg);
      },
      py::arg("queries") = 100, py::arg("docs") = 50, py::arg("subtopics") = 4,
      py::arg("sigma") = 0.2, py::arg("seed") = 1);

  m.def(
      "raw_dcem",
      [](const Ranking& ranking, const std::vector<std::vector<int>>& rel,
         std::vector<double> probs, const MeasureParams& p) {
        return raw_dcem(ranking, judgments_from(rel, std::move(probs)), p);
      },
      py::arg("ranking"), py::arg("rel"), py::arg("probs") = std::vector<double>{},
      py::arg("params") = MeasureParams{},
      "Unnormalized cascade score; rel is subtopic x document.");
  m.def(
      "dcem",
      [](const Ranking& ranking, const QueryInstance& q, const MeasureParams& p) {
        return dcem(ranking, q, p);
      },
      py::arg("ranking"), py::arg("query"), py::arg("params") = MeasureParams{});
  m.def("build_target", &build_target, py::arg("query"), py::arg("params") = MeasureParams{});
  m.def("predict", &predict, py::arg("weights"), py::arg("query"), py::arg("k") = 20);

  m.def(
      "odp_distance",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return odp_distance(paths(a), paths(b));
      },
      py::arg("categories_a"), py::arg("categories_b"));
  m.def("url_dissim", &url_dissim, py::arg("url_a"), py::arg("url_b"));
  m.def(
      "cosine_dissim",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine_dissim(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "train",
      [](const std::vector<QueryInstance>& queries, double c, const MeasureParams& p) {
        TrainConfig cfg;
        cfg.c = c;
        cfg.measure = p;
        const auto examples = make_training_set(queries, p);
        TrainResult result;
        {
          py::gil_scoped_release release;
          result = cutting_plane_train(examples, cfg);
        }
        py::dict stats;
        stats["outer_iterations"] = result.stats.outer_iterations;
        stats["constraints_added"] = result.stats.constraints_added;
        stats["final_objective"] = result.stats.final_objective;
        stats["truncated"] = result.stats.truncated;
        return py::make_tuple(result.w, stats);
      },
      py::arg("queries"), py::arg("c") = 1.0, py::arg("params") = MeasureParams{},
      "Cutting-plane training; returns (weights, stats).");
  m.def(
      "mean_dcem",
      [](const WeightVector& w, const std::vector<QueryInstance>& queries,
         const MeasureParams& p) { return mean_dcem(w, queries, p); },
      py::arg("weights"), py::arg("queries"), py::arg("params") = MeasureParams{});

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int status = run_cli(args, out, err);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line; returns (status, stdout, stderr).");
}
