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

#include "divrank/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "divrank/error.hpp"
#include "divrank/greedy.hpp"
#include "divrank/metrics.hpp"
#include "divrank/model.hpp"
#include "divrank/parallel.hpp"
#include "divrank/plsa.hpp"
#include "divrank/synth.hpp"
#include "divrank/trainer.hpp"
#include "json.hpp"

namespace divrank {
namespace {

using ojson = nlohmann::ordered_json;

// ---- pipeline helpers ----

DenseMatrix topic_rows(const TopicModel& tm, std::size_t first, std::size_t count) {
  DenseMatrix rows(count, tm.num_topics);
  for (std::size_t d = 0; d < count; ++d) {
    const auto src = tm.doc_topic.row(first + d);
    std::copy(src.begin(), src.end(), rows.row(d).begin());
  }
  return rows;
}

std::vector<double> selection_gains(const WeightVector& w, const QueryInstance& q,
                                    std::span<const DocIndex> ranking) {
  std::vector<double> gains;
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    const DocIndex d = ranking[pos];
    double g = dot(w.w_rel, q.docs[d].relevance_features);
    for (std::size_t u = 0; u < pos; ++u) g += dot(w.w_div, q.pairwise.pair(ranking[u], d));
    gains.push_back(g);
  }
  return gains;
}

// ---- output bookkeeping ----

// Files written by the current command; removed if the command fails.
class Outputs {
 public:
  void written(const std::string& path) { paths_.push_back(path); }
  void rollback() {
    for (const auto& p : paths_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    paths_.clear();
  }

 private:
  std::vector<std::string> paths_;
};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

// ---- option groups ----

struct MeasureFlags {
  std::string measure = "err-ia";
  double alpha = 0.5;
  double beta = 0.5;
  std::size_t cutoff = 20;

  void add(CLI::App* app) {
    app->add_option("--measure", measure, "err-ia, alpha-ndcg or nrbp")->capture_default_str();
    app->add_option("--alpha", alpha, "Novelty decay alpha in (0,1]")->capture_default_str();
    app->add_option("--beta", beta, "NRBP patience beta in (0,1)")->capture_default_str();
    app->add_option("--cutoff", cutoff, "Rank cutoff K")->capture_default_str();
  }
  MeasureParams params() const {
    MeasureParams p;
    p.measure = parse_measure(measure);
    p.alpha = alpha;
    p.beta = beta;
    p.cutoff = cutoff;
    p.validate();
    return p;
  }
};

struct TrainFlags {
  double c = 1.0;
  double epsilon = 1e-3;
  std::size_t max_iters = 200;
  double qp_tol = 1e-8;
  std::size_t prune_after = 50;
  std::string sweep_mode = "sequential";

  void add(CLI::App* app) {
    app->add_option("--c", c, "Regularization trade-off C")->capture_default_str();
    app->add_option("--epsilon", epsilon, "Constraint violation tolerance")->capture_default_str();
    app->add_option("--max-iters", max_iters, "Outer iteration cap")->capture_default_str();
    app->add_option("--qp-tol", qp_tol, "QP tolerance")->capture_default_str();
    app->add_option("--prune-after", prune_after,
                    "Drop constraints inactive for this many re-solves (0 = never)")
        ->capture_default_str();
    app->add_option("--sweep-mode", sweep_mode, "sequential or batched")
        ->check(CLI::IsMember({"sequential", "batched"}))
        ->capture_default_str();
  }
  TrainConfig config(const MeasureParams& p, std::size_t threads) const {
    TrainConfig cfg;
    cfg.c = c;
    cfg.epsilon = epsilon;
    cfg.max_outer_iters = max_iters;
    cfg.qp_tol = qp_tol;
    cfg.prune_after = prune_after;
    cfg.sweep_mode = sweep_mode == "batched" ? SweepMode::kBatched : SweepMode::kSequential;
    cfg.threads = threads;
    cfg.measure = p;
    cfg.validate();
    return cfg;
  }
};

std::size_t channel_index(const DatasetManifest& m, const std::string& name) {
  for (std::size_t c = 0; c < m.channels.size(); ++c) {
    if (m.channels[c] == name) return c;
  }
  throw InvalidArgument(fmt::format("dataset has no channel '{}'", name));
}

std::vector<Ranking> load_targets(const std::string& path, std::span<const QueryInstance> queries) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path));
  std::map<std::string, std::vector<std::string>> by_query;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      by_query[j.at("query_id").get<std::string>()] =
          j.at("ranking").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("{}:{}: {}", path, line_no, e.what()), line_no);
    }
  }
  std::vector<Ranking> out;
  for (const auto& q : queries) {
    const auto it = by_query.find(q.query_id);
    if (it == by_query.end()) {
      out.emplace_back();
      continue;
    }
    std::vector<RunEntry> entries;
    for (const auto& id : it->second) entries.push_back({id, 0.0});
    out.push_back(run_to_ranking(q, entries));
  }
  return out;
}

// ---- commands ----

struct Context {
  std::ostream* out;
  Outputs* outputs;
  std::size_t threads = 1;
};

void cmd_synth(const Context& ctx, const SynthConfig& cfg, const std::string& out_path) {
  save_dataset(out_path, generate(cfg));
  ctx.outputs->written(out_path);
  *ctx.out << fmt::format("wrote {} queries to {}\n", cfg.num_queries, out_path);
}

void cmd_feature_extract(const Context& ctx, const std::string& data, const std::string& out_path,
                         FeatureExtractOptions opt, const std::vector<std::string>& channels) {
  if (!channels.empty()) {
    opt.pairwise.channels.clear();
    for (const auto& name : channels) {
      const auto c = parse_channel(name);
      if (!c) throw InvalidArgument(fmt::format("unknown channel '{}'", name));
      opt.pairwise.channels.push_back(*c);
    }
  }
  opt.threads = ctx.threads;
  const Dataset ds = load_dataset(data);
  save_dataset(out_path, extract_features(ds, opt));
  ctx.outputs->written(out_path);
  *ctx.out << fmt::format("wrote features for {} queries to {}\n", ds.queries.size(), out_path);
}

void cmd_build_targets(const Context& ctx, const std::string& data, const std::string& split,
                       const MeasureParams& p, const std::string& out_path,
                       const std::string& run_path) {
  const Dataset ds = load_dataset(data);
  const auto queries = select_split(ds, split);
  std::ostringstream targets;
  std::vector<QueryInstance> kept;
  std::vector<Ranking> rankings;
  std::vector<std::vector<double>> scores;
  std::size_t skipped = 0;
  for (const auto& q : queries) {
    if (!q.judgments.any_relevant()) {
      ++skipped;
      continue;
    }
    const Ranking target = build_target(q, p);
    const double ideal = raw_dcem(target, q.judgments, p);
    ojson line;
    line["query_id"] = q.query_id;
    line["measure"] = std::string(measure_name(p.measure));
    line["alpha"] = p.alpha;
    line["beta"] = p.beta;
    line["cutoff"] = p.cutoff;
    std::vector<std::string> ids;
    for (DocIndex d : target) ids.push_back(q.docs[d].doc_id);
    line["ranking"] = ids;
    line["ideal_raw"] = ideal;
    targets << line.dump() << '\n';
    // Run scores: the cascade gain of each position.
    CascadeState state(q.judgments, p);
    std::vector<double> gains;
    for (DocIndex d : target) gains.push_back(state.append(d));
    kept.push_back(q);
    rankings.push_back(target);
    scores.push_back(std::move(gains));
  }
  write_file_atomic(out_path, [&](std::ostream& os) { os << targets.str(); });
  ctx.outputs->written(out_path);
  if (!run_path.empty()) {
    save_run(run_path, rankings_to_run(kept, rankings, scores));
    ctx.outputs->written(run_path);
  }
  *ctx.out << fmt::format("wrote {} targets ({} skipped) to {}\n", kept.size(), skipped, out_path);
}

void cmd_train(const Context& ctx, const std::string& data, const std::string& split,
               const TrainConfig& cfg, const std::string& targets_path,
               const std::string& model_path, const std::string& log_path) {
  const Dataset ds = load_dataset(data);
  const auto queries = select_split(ds, split);
  std::vector<std::string> skipped;
  std::vector<Ranking> targets;
  if (!targets_path.empty()) targets = load_targets(targets_path, queries);
  const auto examples = make_training_set(queries, targets, cfg.measure, &skipped);
  std::ostringstream log;
  const TrainResult result = cutting_plane_train(examples, cfg, [&](const IterationRecord& r) {
    ojson line;
    line["iteration"] = r.iteration;
    line["objective"] = r.objective;
    line["constraints"] = r.constraints;
    line["added"] = r.added;
    line["mean_train_loss"] = r.mean_train_loss;
    log << line.dump() << '\n';
  });
  Model model;
  model.w = result.w;
  model.meta.measure = cfg.measure;
  model.meta.channels = ds.manifest.channels;
  model.meta.train = cfg;
  model.meta.dataset_hash = file_hash(data);
  model.meta.outer_iterations = result.stats.outer_iterations;
  model.meta.truncated = result.stats.truncated;
  save_model(model_path, model);
  ctx.outputs->written(model_path);
  if (!log_path.empty()) {
    ojson done;
    done["event"] = "done";
    done["outer_iterations"] = result.stats.outer_iterations;
    done["constraints_added"] = result.stats.constraints_added;
    done["constraints_pruned"] = result.stats.constraints_pruned;
    done["final_objective"] = result.stats.final_objective;
    done["truncated"] = result.stats.truncated;
    done["skipped_queries"] = skipped;
    log << done.dump() << '\n';
    write_file_atomic(log_path, [&](std::ostream& os) { os << log.str(); });
    ctx.outputs->written(log_path);
  }
  const double loss = result.stats.iterations.empty()
                          ? 0.0
                          : result.stats.iterations.back().mean_train_loss;
  *ctx.out << fmt::format(
      "trained on {} queries ({} skipped): {} outer iterations, {} constraints, objective {:.6g}, "
      "mean training loss {:.6g}{}\n",
      examples.size(), skipped.size(), result.stats.outer_iterations,
      result.stats.constraints_added, result.stats.final_objective, loss,
      result.stats.truncated ? " (truncated)" : "");
}

void cmd_predict(const Context& ctx, const std::string& data, const std::string& split,
                 const std::string& model_path, std::size_t cutoff, const std::string& out_path,
                 std::ostream& err) {
  const Dataset ds = load_dataset(data);
  const Model model = load_model(model_path);
  check_compatibility(model, ds.manifest);
  if (!model.meta.dataset_hash.empty() && model.meta.dataset_hash != file_hash(data)) {
    err << "warning: dataset differs from the one the model was trained on\n";
  }
  const auto queries = select_split(ds, split);
  const std::size_t k = cutoff > 0 ? cutoff : model.meta.measure.cutoff;
  save_run(out_path, predict_run(model.w, queries, k, ctx.threads));
  ctx.outputs->written(out_path);
  *ctx.out << fmt::format("wrote rankings for {} queries to {}\n", queries.size(), out_path);
}

void cmd_evaluate(const Context& ctx, const std::string& data, const std::string& split,
                  const std::string& run_path, const MeasureParams& p,
                  const std::string& out_path) {
  const Dataset ds = load_dataset(data);
  const auto queries = select_split(ds, split);
  std::vector<std::string> ids;
  for (const auto& q : ds.queries) ids.push_back(q.query_id);
  const auto rows = evaluate_run(queries, load_run(run_path), p, ids);
  if (!out_path.empty()) {
    write_file_atomic(out_path, [&](std::ostream& os) { write_report(os, rows); });
    ctx.outputs->written(out_path);
  }
  print_report(*ctx.out, rows);
}

struct BaselineArgs {
  std::string method = "relevance";
  std::vector<double> lambda_grid = default_lambda_grid();
  double lambda = -1.0;
  std::string tune_split = "val";
  std::size_t score_feature = 0;
  std::string sim_channel = "text";
};

void cmd_baseline(const Context& ctx, const std::string& data, const std::string& split,
                  const BaselineArgs& args, const MeasureParams& p, const std::string& out_path) {
  const Dataset ds = load_dataset(data);
  const auto queries = select_split(ds, split);
  std::vector<Ranking> rankings(queries.size());
  std::vector<std::vector<double>> scores(queries.size());
  if (args.method == "relevance") {
    parallel_for(queries.size(), ctx.threads, [&](std::size_t i) {
      const auto& q = queries[i];
      const auto s = feature_scores(q, args.score_feature);
      rankings[i] = relevance_rank(s, std::min(p.cutoff, q.num_docs()));
      for (DocIndex d : rankings[i]) scores[i].push_back(s[d]);
    });
    *ctx.out << "relevance-only baseline\n";
  } else {
    MmrSettings settings;
    settings.score_feature = args.score_feature;
    settings.sim_channel = channel_index(ds.manifest, args.sim_channel);
    double lambda = args.lambda;
    if (lambda < 0.0) {
      const auto tuning = tune_lambda(select_split(ds, args.tune_split), settings,
                                      args.lambda_grid, p, ctx.threads);
      lambda = tuning.lambda;
      for (std::size_t g = 0; g < args.lambda_grid.size(); ++g) {
        *ctx.out << fmt::format("lambda {:.3g}: mean {} {:.6f}\n", args.lambda_grid[g],
                                measure_name(p.measure), tuning.scores[g]);
      }
    }
    parallel_for(queries.size(), ctx.threads, [&](std::size_t i) {
      const auto& q = queries[i];
      rankings[i] = mmr_for_query(q, settings, lambda, std::min(p.cutoff, q.num_docs()));
      const auto s = feature_scores(q, settings.score_feature);
      for (DocIndex d : rankings[i]) scores[i].push_back(s[d]);
    });
    *ctx.out << fmt::format("MMR baseline, lambda {:.3g}\n", lambda);
  }
  save_run(out_path, rankings_to_run(queries, rankings, scores));
  ctx.outputs->written(out_path);
}

void cmd_sweep_c(const Context& ctx, const std::string& data, const std::string& train_split,
                 const std::string& val_split, std::vector<double> grid, const TrainConfig& cfg,
                 const std::string& out_path, const std::string& model_path) {
  const Dataset ds = load_dataset(data);
  const auto train = select_split(ds, train_split);
  const auto val = select_split(ds, val_split);
  const auto examples = make_training_set(train, cfg.measure);
  if (grid.empty()) grid = default_c_grid();
  const SweepResult sweep = c_sweep(examples, val, grid, cfg);
  auto write_table = [&](std::ostream& os) {
    os << "c\ttrain_loss\tvalidation_dcem\touter_iterations\tconstraints\ttruncated\n";
    for (const auto& row : sweep.rows) {
      os << format_real(row.c) << '\t' << format_real(row.train_loss) << '\t'
         << format_real(row.validation_dcem) << '\t' << row.stats.outer_iterations << '\t'
         << row.stats.constraints_added << '\t' << (row.stats.truncated ? 1 : 0) << '\n';
    }
  };
  if (!out_path.empty()) {
    write_file_atomic(out_path, write_table);
    ctx.outputs->written(out_path);
  }
  *ctx.out << fmt::format("{:>10}  {:>10}  {:>10}  {:>6}\n", "C", "train_loss",
                          fmt::format("val_{}", measure_name(cfg.measure.measure)), "iters");
  for (std::size_t r = 0; r < sweep.rows.size(); ++r) {
    const auto& row = sweep.rows[r];
    *ctx.out << fmt::format("{:>10.3g}  {:>10.6f}  {:>10.6f}  {:>6}{}\n", row.c, row.train_loss,
                            row.validation_dcem, row.stats.outer_iterations,
                            r == sweep.best ? "  *" : "");
  }
  if (!model_path.empty()) {
    Model model;
    model.w = sweep.rows[sweep.best].w;
    model.meta.measure = cfg.measure;
    model.meta.channels = ds.manifest.channels;
    model.meta.train = cfg;
    model.meta.train.c = sweep.rows[sweep.best].c;
    model.meta.dataset_hash = file_hash(data);
    model.meta.outer_iterations = sweep.rows[sweep.best].stats.outer_iterations;
    model.meta.truncated = sweep.rows[sweep.best].stats.truncated;
    save_model(model_path, model);
    ctx.outputs->written(model_path);
  }
}

}  // namespace

Dataset extract_features(const Dataset& ds, const FeatureExtractOptions& options) {
  Dataset out = ds;
  const auto& channels = options.pairwise.channels;
  if (channels.empty()) throw InvalidArgument("no diversity channels selected");
  const bool want_topic =
      std::find(channels.begin(), channels.end(), DiversityChannel::kTopic) != channels.end();
  std::vector<DenseMatrix> topics(ds.queries.size());
  if (want_topic) {
    if (options.plsa_per_collection) {
      std::vector<const DocumentRecord*> docs;
      for (const auto& q : ds.queries) {
        for (const auto& d : q.docs) docs.push_back(&d);
      }
      const TopicModel tm = plsa_fit(text_corpus(docs), options.plsa);
      std::size_t first = 0;
      for (std::size_t qi = 0; qi < ds.queries.size(); ++qi) {
        topics[qi] = topic_rows(tm, first, ds.queries[qi].num_docs());
        first += ds.queries[qi].num_docs();
      }
    } else {
      parallel_for(ds.queries.size(), options.threads, [&](std::size_t qi) {
        std::vector<const DocumentRecord*> docs;
        for (const auto& d : ds.queries[qi].docs) docs.push_back(&d);
        topics[qi] = plsa_fit(text_corpus(docs), options.plsa).doc_topic;
      });
    }
  }
  parallel_for(ds.queries.size(), options.threads, [&](std::size_t qi) {
    out.queries[qi].pairwise = assemble_pairwise(ds.queries[qi].docs,
                                                 want_topic ? &topics[qi] : nullptr,
                                                 options.pairwise);
  });
  out.manifest.channels.clear();
  for (auto c : channels) out.manifest.channels.emplace_back(channel_name(c));
  return out;
}

Run rankings_to_run(std::span<const QueryInstance> queries, std::span<const Ranking> rankings,
                    std::span<const std::vector<double>> scores) {
  Run run;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    run.query_order.push_back(q.query_id);
    auto& entries = run.entries[q.query_id];
    for (std::size_t pos = 0; pos < rankings[i].size(); ++pos) {
      const double s = scores.empty() ? static_cast<double>(rankings[i].size() - pos)
                                      : scores[i][pos];
      entries.push_back({q.docs[rankings[i][pos]].doc_id, s});
    }
  }
  return run;
}

Run predict_run(const WeightVector& w, std::span<const QueryInstance> queries,
                std::size_t cutoff, std::size_t threads) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  std::vector<Ranking> rankings(queries.size());
  std::vector<std::vector<double>> scores(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    const auto& q = queries[i];
    rankings[i] = predict(w, q, std::min(cutoff, q.num_docs()));
    scores[i] = selection_gains(w, q, rankings[i]);
  });
  return rankings_to_run(queries, rankings, scores);
}

std::vector<EvalRow> evaluate_run(std::span<const QueryInstance> queries, const Run& run,
                                  const MeasureParams& p, std::span<const std::string> all_ids) {
  p.validate();
  if (!all_ids.empty()) {
    for (const auto& [qid, entries] : run.entries) {
      if (std::find(all_ids.begin(), all_ids.end(), qid) == all_ids.end()) {
        throw InvalidArgument(fmt::format("run query '{}' is not in the dataset", qid));
      }
    }
  }
  std::vector<EvalRow> rows;
  for (const auto& q : queries) {
    EvalRow row;
    row.query_id = q.query_id;
    const auto it = run.entries.find(q.query_id);
    if (!q.judgments.any_relevant()) {
      row.status = "skipped";
    } else if (it == run.entries.end()) {
      row.status = "missing";
    } else {
      row.status = "ok";
      Ranking ranking = run_to_ranking(q, it->second);
      if (ranking.size() > p.cutoff) ranking.resize(p.cutoff);
      MeasureParams m = p;
      m.measure = Measure::kErrIa;
      row.err_ia = dcem(ranking, q, m);
      m.measure = Measure::kAlphaNdcg;
      row.alpha_ndcg = dcem(ranking, q, m);
      m.measure = Measure::kNrbp;
      row.nrbp = dcem(ranking, q, m);
      row.precision_ia = precision_ia(ranking, q.judgments, p.cutoff);
      row.subtopic_recall = subtopic_recall(ranking, q.judgments, p.cutoff);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_report(std::ostream& out, std::span<const EvalRow> rows) {
  out << fmt::format("{:<12} {:<8} {:>8} {:>10} {:>8} {:>8} {:>8}\n", "query", "status",
                     "ERR-IA", "alpha-NDCG", "NRBP", "P-IA", "S-rec");
  auto emit = [&](const EvalRow& r) {
    out << fmt::format("{:<12} {:<8} {:>8.4f} {:>10.4f} {:>8.4f} {:>8.4f} {:>8.4f}\n",
                       r.query_id, r.status, r.err_ia, r.alpha_ndcg, r.nrbp, r.precision_ia,
                       r.subtopic_recall);
  };
  std::size_t ok = 0;
  for (const auto& r : rows) {
    emit(r);
    if (r.status == "ok") ++ok;
  }
  emit(mean_row(rows));
  out << fmt::format("{} of {} queries scored\n", ok, rows.size());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning to diversify rankings by structural max-margin training"};
  app.name("divrank");
  app.require_subcommand(1);
  app.fallthrough();
  const char* env_config = std::getenv("DIVRANK_CONFIG");
  app.set_config("--config", env_config != nullptr ? env_config : "",
                 "Config file (default from DIVRANK_CONFIG)", false);

  std::size_t threads = 1;
  app.add_option("--threads", threads, "Worker threads for per-query phases")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // synth
  SynthConfig synth;
  std::string synth_out;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset");
  s->add_option("--out", synth_out, "Output dataset")->required();
  s->add_option("--queries", synth.num_queries)->capture_default_str();
  s->add_option("--docs", synth.num_docs, "Candidates per query")->capture_default_str();
  s->add_option("--subtopics", synth.num_subtopics)->capture_default_str();
  s->add_option("--rel-dim", synth.rel_dim, "Relevance features R")->capture_default_str();
  s->add_option("--channels", synth.num_channels, "Diversity channels F")->capture_default_str();
  s->add_option("--sigma", synth.sigma, "Feature noise")->capture_default_str();
  s->add_option("--signal", synth.signal, "Diversity signal strength")->capture_default_str();
  s->add_option("--redundancy", synth.redundancy)->capture_default_str();
  s->add_option("--irrelevant", synth.irrelevant_rate)->capture_default_str();
  s->add_option("--popularity", synth.popularity_bias)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();

  // feature-extract
  FeatureExtractOptions fx;
  std::string fx_data, fx_out, fx_scope = "collection";
  std::vector<std::string> fx_channels;
  auto* f = app.add_subcommand("feature-extract", "Compute pairwise diversity features");
  f->add_option("--data", fx_data, "Input dataset with raw document fields")->required();
  f->add_option("--out", fx_out, "Output dataset")->required();
  f->add_option("--topics", fx.plsa.num_topics, "pLSA topics m")->capture_default_str();
  f->add_option("--top-t", fx.pairwise.top_t, "Values kept per document and channel")
      ->capture_default_str();
  f->add_option("--channels", fx_channels, "Channels to compute (default all)")->delimiter(',');
  f->add_option("--plsa-scope", fx_scope, "collection or query")
      ->check(CLI::IsMember({"collection", "query"}))
      ->capture_default_str();
  f->add_option("--plsa-iters", fx.plsa.max_iters)->capture_default_str();
  f->add_option("--plsa-tol", fx.plsa.tol)->capture_default_str();
  f->add_option("--seed", fx.plsa.seed)->capture_default_str();

  // build-targets
  std::string bt_data, bt_out, bt_run, bt_split;
  MeasureFlags bt_m;
  auto* b = app.add_subcommand("build-targets", "Greedy ideal rankings per query");
  b->add_option("--data", bt_data)->required();
  b->add_option("--out", bt_out, "Targets (JSON lines)")->required();
  b->add_option("--run-out", bt_run, "Also write the targets as a run file");
  b->add_option("--split", bt_split, "Query split (default all)");
  bt_m.add(b);

  // train
  std::string tr_data, tr_model, tr_log, tr_targets, tr_split;
  MeasureFlags tr_m;
  TrainFlags tr_t;
  auto* t = app.add_subcommand("train", "Cutting-plane structural SVM training");
  t->add_option("--data", tr_data)->required();
  t->add_option("--model", tr_model, "Output model")->required();
  t->add_option("--log", tr_log, "Training log (JSON lines)");
  t->add_option("--targets", tr_targets, "Targets from build-targets");
  t->add_option("--split", tr_split, "Query split (default all)");
  tr_m.add(t);
  tr_t.add(t);

  // predict
  std::string pr_data, pr_model, pr_out, pr_split;
  std::size_t pr_cutoff = 0;
  auto* p = app.add_subcommand("predict", "Rank with a trained model");
  p->add_option("--data", pr_data)->required();
  p->add_option("--model", pr_model)->required();
  p->add_option("--out", pr_out, "Run file")->required();
  p->add_option("--split", pr_split, "Query split (default all)");
  p->add_option("--cutoff", pr_cutoff, "Ranking length (default: the model's cutoff)");

  // evaluate
  std::string ev_data, ev_run, ev_out, ev_split;
  MeasureFlags ev_m;
  auto* e = app.add_subcommand("evaluate", "Score a run file");
  e->add_option("--data", ev_data)->required();
  e->add_option("--run", ev_run)->required();
  e->add_option("--out", ev_out, "Report (tab-separated)");
  e->add_option("--split", ev_split, "Query split (default all)");
  ev_m.add(e);

  // baseline
  std::string bl_data, bl_out, bl_split;
  BaselineArgs bl;
  MeasureFlags bl_m;
  auto* bs = app.add_subcommand("baseline", "Relevance-only or MMR rankings");
  bs->add_option("--data", bl_data)->required();
  bs->add_option("--out", bl_out, "Run file")->required();
  bs->add_option("--split", bl_split, "Query split (default all)");
  bs->add_option("--method", bl.method)
      ->check(CLI::IsMember({"relevance", "mmr"}))
      ->capture_default_str();
  bs->add_option("--lambda", bl.lambda, "Fixed MMR lambda (skips tuning)");
  bs->add_option("--lambda-grid", bl.lambda_grid, "Tuning grid")->delimiter(',');
  bs->add_option("--tune-split", bl.tune_split, "Split used to tune lambda")
      ->capture_default_str();
  bs->add_option("--score-feature", bl.score_feature, "Relevance feature used as score")
      ->capture_default_str();
  bs->add_option("--sim-channel", bl.sim_channel, "Channel whose complement is similarity")
      ->capture_default_str();
  bl_m.add(bs);

  // sweep-c
  std::string sw_data, sw_out, sw_model, sw_train = "train", sw_val = "val";
  std::vector<double> sw_grid;
  MeasureFlags sw_m;
  TrainFlags sw_t;
  auto* sw = app.add_subcommand("sweep-c", "Train over a C grid and pick by validation");
  sw->add_option("--data", sw_data)->required();
  sw->add_option("--out", sw_out, "Sweep table (tab-separated)");
  sw->add_option("--model-out", sw_model, "Write the selected model");
  sw->add_option("--train-split", sw_train)->capture_default_str();
  sw->add_option("--val-split", sw_val)->capture_default_str();
  sw->add_option("--grid", sw_grid, "C values (default 1e-4..1e3)")->delimiter(',');
  sw_m.add(sw);
  sw_t.add(sw);

  std::vector<const char*> argv;
  argv.push_back("divrank");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    err << fmt::format("error: kind=usage message=\"{}\"\n", escape(ex.what()));
    return 2;
  }

  Outputs outputs;
  Context ctx{&out, &outputs, threads};
  try {
    if (s->parsed()) {
      cmd_synth(ctx, synth, synth_out);
    } else if (f->parsed()) {
      fx.plsa_per_collection = fx_scope == "collection";
      cmd_feature_extract(ctx, fx_data, fx_out, fx, fx_channels);
    } else if (b->parsed()) {
      cmd_build_targets(ctx, bt_data, bt_split, bt_m.params(), bt_out, bt_run);
    } else if (t->parsed()) {
      cmd_train(ctx, tr_data, tr_split, tr_t.config(tr_m.params(), threads), tr_targets,
                tr_model, tr_log);
    } else if (p->parsed()) {
      cmd_predict(ctx, pr_data, pr_split, pr_model, pr_cutoff, pr_out, err);
    } else if (e->parsed()) {
      cmd_evaluate(ctx, ev_data, ev_split, ev_run, ev_m.params(), ev_out);
    } else if (bs->parsed()) {
      cmd_baseline(ctx, bl_data, bl_split, bl, bl_m.params(), bl_out);
    } else if (sw->parsed()) {
      cmd_sweep_c(ctx, sw_data, sw_train, sw_val, sw_grid, sw_t.config(sw_m.params(), threads),
                  sw_out, sw_model);
    }
  } catch (const Error& ex) {
    outputs.rollback();
    err << fmt::format("error: kind={} message=\"{}\"\n", ex.kind(), escape(ex.what()));
    return 1;
  } catch (const std::exception& ex) {
    outputs.rollback();
    err << fmt::format("error: kind=internal message=\"{}\"\n", escape(ex.what()));
    return 1;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace divrank
