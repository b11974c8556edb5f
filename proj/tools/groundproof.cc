// Copyright 2026 The Groundproof Authors.
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

// Command line front end: finetune data, decoding runs, scoring, annotation
// aggregation, correlation and the HTTP service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "groundproof/annotations.h"
#include "groundproof/corpus.h"
#include "groundproof/harness.h"
#include "groundproof/mock_model.h"
#include "groundproof/promptgen.h"
#include "groundproof/remote_model.h"
#include "groundproof/service.h"
#include "json.hpp"

namespace gp = groundproof;
using json = nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string backend = "mock";
  std::string mock_script;
  std::string corpus_path;
  std::string corpus_format = "json";
  int max_in_flight = 0;
  int per_minute = 0;
};

gp::Corpus LoadCorpus(const Globals &g) {
  if (g.corpus_path.empty()) throw CLI::ValidationError("--corpus", "a corpus is required");
  auto format = g.corpus_format == "jsonl" ? gp::Corpus::Format::kJsonLines
                                           : gp::Corpus::Format::kJson;
  gp::Corpus corpus = gp::load_corpus(g.corpus_path, format);
  for (const gp::DanglingMention &d : corpus.diagnostics()) {
    std::cerr << "warning: theorem " << d.theorem_id << " mentions unknown page '"
              << d.title << "'\n";
  }
  return corpus;
}

gp::ExperimentConfig LoadConfig(const Globals &g) {
  gp::ExperimentConfig config;
  if (!g.config_path.empty()) config = gp::ExperimentConfig::Load(g.config_path);
  if (g.seed) config.seed = *g.seed;
  return config;
}

std::shared_ptr<gp::LanguageModel> MakeBackend(const Globals &g, uint64_t seed) {
  std::shared_ptr<gp::LanguageModel> lm;
  if (g.backend == "mock") {
    if (g.mock_script.empty()) {
      throw CLI::ValidationError("--mock-script", "the mock backend needs a script");
    }
    lm = gp::load_mock_script(g.mock_script, seed);
  } else {
    lm = std::make_shared<gp::RemoteModel>(gp::RemoteConfig::FromEnvironment());
  }
  if (g.max_in_flight > 0 || g.per_minute > 0) {
    lm = std::make_shared<gp::RateLimitedModel>(lm, g.max_in_flight, g.per_minute);
  }
  return lm;
}

void WriteText(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

json ReadJson(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return json::parse(in);
}

// "label=path" pairs.
std::pair<std::string, std::string> SplitLabel(const std::string &arg) {
  size_t eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw CLI::ValidationError("expected label=path, got '" + arg + "'");
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

gp::RunReport ReportFromJson(const json &j) {
  gp::RunReport r;
  std::array<double, 7> v{};
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] = j.at("means").at(gp::MetricReport::kFieldNames[i]).get<double>();
  }
  r.means = gp::MetricReport::FromValues(v);
  return r;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Reference-grounded proof generation and evaluation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Seed, overrides the config and mock script");
  app.add_option("--backend", g.backend, "Language model backend")
      ->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--mock-script", g.mock_script, "Script for the mock backend");
  app.add_option("--corpus", g.corpus_path, "Corpus file");
  app.add_option("--corpus-format", g.corpus_format)->check(CLI::IsMember({"json", "jsonl"}));
  app.add_option("--max-in-flight", g.max_in_flight, "Concurrent backend calls, 0 = no cap");
  app.add_option("--per-minute", g.per_minute, "Backend calls per minute, 0 = no cap");

  // emit-finetune
  auto *emit = app.add_subcommand("emit-finetune", "Write prompt/completion training data");
  std::string emit_setting = "provided", emit_retrievals, emit_out;
  emit->add_option("--setting", emit_setting)
      ->check(CLI::IsMember({"none", "retrieved", "provided"}));
  emit->add_option("--retrievals", emit_retrievals, "Retrievals file for 'retrieved'");
  emit->add_option("--out", emit_out, "Output JSONL")->required();

  // decode
  auto *decode = app.add_subcommand("decode", "Run the configured experiment");
  std::string decode_out, decode_csv, decode_entries_csv;
  decode->add_option("--out", decode_out, "Report JSON, '-' for stdout");
  decode->add_option("--csv", decode_csv, "CSV of means");
  decode->add_option("--entries-csv", decode_entries_csv, "CSV of per-entry metrics");

  // suggest
  auto *suggest = app.add_subcommand("suggest", "Sample next-step suggestions");
  int suggest_theorem = 0, suggest_k = 3;
  double suggest_temperature = 0.6;
  std::string suggest_setting = "none", suggest_history;
  suggest->add_option("--theorem-id", suggest_theorem)->required();
  suggest->add_option("-k", suggest_k);
  suggest->add_option("--temperature", suggest_temperature);
  suggest->add_option("--setting", suggest_setting)
      ->check(CLI::IsMember({"none", "retrieved", "provided"}));
  suggest->add_option("--history", suggest_history, "JSON list of accepted steps");

  // score
  auto *score = app.add_subcommand("score", "Score predicted proofs");
  std::string score_predictions, score_out, score_csv, score_entries_csv;
  score->add_option("--predictions", score_predictions, "JSONL {theorem_id, proof}")
      ->required();
  score->add_option("--out", score_out);
  score->add_option("--csv", score_csv);
  score->add_option("--entries-csv", score_entries_csv);

  // aggregate-annotations
  auto *aggregate = app.add_subcommand("aggregate-annotations", "Summarize human ratings");
  std::string annotations_path, aggregate_out;
  std::optional<int> correct_threshold, useful_threshold;
  aggregate->add_option("--annotations", annotations_path)->required();
  aggregate->add_option("--out", aggregate_out);
  aggregate->add_option("--correct-threshold", correct_threshold);
  aggregate->add_option("--useful-threshold", useful_threshold);

  // correlate
  auto *correlate = app.add_subcommand("correlate", "Correlate automatic and human metrics");
  std::vector<std::string> run_args, annotation_args;
  std::string correlate_out, correlate_csv;
  correlate->add_option("--run", run_args, "label=report.json")->required();
  correlate->add_option("--annotations", annotation_args, "label=annotations.jsonl")
      ->required();
  correlate->add_option("--out", correlate_out);
  correlate->add_option("--csv", correlate_csv);

  // serve
  auto *serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_config, serve_retrievals;
  std::optional<std::string> serve_host;
  std::optional<int> serve_port;
  serve->add_option("--service-config", serve_config, "Service config (JSON)");
  serve->add_option("--host", serve_host);
  serve->add_option("--port", serve_port);
  serve->add_option("--retrievals", serve_retrievals);

  CLI11_PARSE(app, argc, argv);

  try {
    if (emit->parsed()) {
      gp::Corpus corpus = LoadCorpus(g);
      auto setting = *gp::ParseKnowledgeSetting(emit_setting);
      std::optional<gp::RetrievalFile> retrievals;
      if (!emit_retrievals.empty()) {
        retrievals = gp::load_retrievals(emit_retrievals, &corpus);
        for (const std::string &w : retrievals->warnings) std::cerr << "warning: " << w << '\n';
      }
      size_t n = gp::emit_finetune_file(corpus, setting,
                                        retrievals ? &retrievals->retrievals : nullptr,
                                        emit_out);
      std::cerr << "wrote " << n << " records to " << emit_out << '\n';
    } else if (decode->parsed()) {
      gp::Corpus corpus = LoadCorpus(g);
      gp::ExperimentConfig config = LoadConfig(g);
      auto lm = MakeBackend(g, config.seed);
      gp::RunReport report = gp::run_experiment(config, corpus, *lm);
      for (const gp::TheoremFailure &f : report.failures) {
        std::cerr << "theorem " << f.theorem_id << " failed: " << f.error << '\n';
      }
      WriteText(decode_out, report.to_json().dump(2) + "\n");
      if (!decode_csv.empty()) WriteText(decode_csv, report.means_csv());
      if (!decode_entries_csv.empty()) WriteText(decode_entries_csv, report.entries_csv());
    } else if (suggest->parsed()) {
      gp::Corpus corpus = LoadCorpus(g);
      gp::ExperimentConfig config = LoadConfig(g);
      auto lm = MakeBackend(g, config.seed);
      gp::ServiceConfig service_config;
      service_config.decode = config.decode;
      gp::Service service(corpus, lm, service_config);
      json req = {{"theorem_id", suggest_theorem},
                  {"k", suggest_k},
                  {"temperature", suggest_temperature},
                  {"setting", suggest_setting},
                  {"seed", config.seed}};
      if (!suggest_history.empty()) req["proof_so_far"] = json::parse(suggest_history);
      gp::ServiceResponse res = service.suggest(req.dump());
      std::cout << res.body.dump(2) << '\n';
      if (res.status != 200) return 1;
    } else if (score->parsed()) {
      gp::Corpus corpus = LoadCorpus(g);
      gp::RunReport report =
          gp::score_predictions(gp::load_predictions(score_predictions), corpus);
      for (const gp::TheoremFailure &f : report.failures) {
        std::cerr << "theorem " << f.theorem_id << ": " << f.error << '\n';
      }
      WriteText(score_out, report.to_json().dump(2) + "\n");
      if (!score_csv.empty()) WriteText(score_csv, report.means_csv());
      if (!score_entries_csv.empty()) WriteText(score_entries_csv, report.entries_csv());
    } else if (aggregate->parsed()) {
      gp::AnnotationThresholds thresholds;
      if (!g.config_path.empty()) thresholds = LoadConfig(g).thresholds;
      if (correct_threshold) thresholds.correct = *correct_threshold;
      if (useful_threshold) thresholds.useful = *useful_threshold;
      gp::AggregateReport report =
          gp::aggregate_annotations(gp::load_annotations(annotations_path), thresholds);
      WriteText(aggregate_out, report.to_json().dump(2) + "\n");
    } else if (correlate->parsed()) {
      std::vector<std::pair<std::string, gp::RunReport>> runs;
      for (const std::string &arg : run_args) {
        auto [label, path] = SplitLabel(arg);
        runs.emplace_back(label, ReportFromJson(ReadJson(path)));
      }
      std::vector<std::pair<std::string, gp::AggregateReport>> aggregates;
      for (const std::string &arg : annotation_args) {
        auto [label, path] = SplitLabel(arg);
        aggregates.emplace_back(label,
                                gp::aggregate_annotations(gp::load_annotations(path)));
      }
      gp::CorrelationMatrix m = gp::correlate(runs, aggregates);
      WriteText(correlate_out, m.to_json().dump(2) + "\n");
      if (!correlate_csv.empty()) WriteText(correlate_csv, m.to_csv());
    } else if (serve->parsed()) {
      if (g.corpus_path.empty()) {
        if (const char *env = std::getenv("GROUNDPROOF_CORPUS")) g.corpus_path = env;
      }
      gp::Corpus corpus = LoadCorpus(g);
      gp::ServiceConfig config;
      if (!serve_config.empty()) config = gp::ServiceConfig::FromJson(ReadJson(serve_config));
      else if (!g.config_path.empty()) config.decode = LoadConfig(g).decode;
      config = gp::ServiceConfig::FromEnvironment(config);
      if (serve_host) config.host = *serve_host;
      if (serve_port) config.port = *serve_port;
      auto lm = MakeBackend(g, g.seed.value_or(0));
      std::optional<gp::RetrievalFile> retrievals;
      if (!serve_retrievals.empty()) {
        retrievals = gp::load_retrievals(serve_retrievals, &corpus);
      }
      gp::Service service(corpus, lm, config,
                          retrievals ? &retrievals->retrievals : nullptr);
      std::cerr << "listening on " << config.host << ':' << config.port << '\n';
      if (!gp::serve(service, config.host, config.port)) {
        std::cerr << "error: cannot bind " << config.host << ':' << config.port << '\n';
        return 1;
      }
    }
  } catch (const CLI::Error &e) {
    return app.exit(e);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
