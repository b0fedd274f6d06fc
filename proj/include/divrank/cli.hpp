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
// Command-line front end and the pipeline steps it strings together.
//
//   divrank synth | feature-extract | build-targets | train | predict |
//           evaluate | baseline | sweep-c
//
// Failures print one line
//
//   error: kind=<kind> message="<text>"
//
// on stderr and exit nonzero; files written by the failing command are
// removed. DIVRANK_CONFIG names a default config file (TOML/INI, one section
// per subcommand).
//

#ifndef DIVRANK_CLI_HPP_
#define DIVRANK_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "divrank/baselines.hpp"
#include "divrank/core.hpp"
#include "divrank/features.hpp"
#include "divrank/io.hpp"

namespace divrank {

struct FeatureExtractOptions {
  PairwiseConfig pairwise;
  PlsaOptions plsa;
  // Fit one topic model over all candidate sets (true) or one per query.
  bool plsa_per_collection = true;
  std::size_t threads = 1;
};

// Replaces every query's pairwise tensor with freshly computed channels.
Dataset extract_features(const Dataset& ds, const FeatureExtractOptions& options);

// Greedy predictions of length min(cutoff, n); the score of each entry is
// its marginal discriminant gain at selection time.
Run predict_run(const WeightVector& w, std::span<const QueryInstance> queries,
                std::size_t cutoff, std::size_t threads = 1);

Run rankings_to_run(std::span<const QueryInstance> queries, std::span<const Ranking> rankings,
                    std::span<const std::vector<double>> scores = {});

// One row per query of `queries` (in order): "skipped" when no document is
// relevant, "missing" when the run has no entry for it, otherwise "ok" with
// every measure at p.cutoff. Run queries unknown to `all_ids` are an error.
std::vector<EvalRow> evaluate_run(std::span<const QueryInstance> queries, const Run& run,
                                  const MeasureParams& p,
                                  std::span<const std::string> all_ids = {});

// Human-readable report.
void print_report(std::ostream& out, std::span<const EvalRow> rows);

// Runs the command line; returns the process exit status.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace divrank

#endif  // DIVRANK_CLI_HPP_
