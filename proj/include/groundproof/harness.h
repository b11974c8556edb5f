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

#ifndef GROUNDPROOF_HARNESS_H_
#define GROUNDPROOF_HARNESS_H_

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "groundproof/annotations.h"
#include "groundproof/corpus.h"
#include "groundproof/decoder.h"
#include "groundproof/lmbackend.h"
#include "groundproof/metrics.h"
#include "groundproof/promptgen.h"
#include "json.hpp"

namespace groundproof {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { kFullProof, kNextStep };

const char *TaskName(Task task);
std::optional<Task> ParseTask(std::string_view name);

struct ExperimentConfig {
  KnowledgeSetting setting = KnowledgeSetting::kProvided;
  Task task = Task::kFullProof;
  DecodeConfig decode;
  Split split = Split::kTest;
  std::optional<std::vector<int>> theorem_filter;
  std::optional<std::string> retrievals_path;
  int suggestions_k = 10;
  double suggestion_temperature = 0.6;
  uint64_t seed = 0;
  // Caps the number of gold steps evaluated per proof in next-step runs.
  std::optional<int> max_steps_per_proof;
  // Theorems processed concurrently.
  int workers = 1;
  AnnotationThresholds thresholds;

  // Throws HarnessError when settings are incompatible: retrieved knowledge
  // needs a retrievals file, and stepwise modes run only on the full-proof
  // task with provided references.
  void validate() const;

  nlohmann::json to_json() const;
  static ExperimentConfig FromJson(const nlohmann::json &j);
  static ExperimentConfig Load(const std::string &path);
};

struct RetrievalFile {
  Retrievals retrievals;
  std::vector<std::string> warnings;
};

// Reads {"<theorem id>": ["title", ...], ...}. Titles are normalized; lists
// shorter than 20 are kept, longer ones cut to 20, duplicates dropped after
// their first occurrence, each with a warning. With a corpus, ids that are
// not theorem pages are reported as warnings too. Throws HarnessError on
// malformed input.
RetrievalFile load_retrievals(const std::string &path, const Corpus *corpus = nullptr);
RetrievalFile parse_retrievals(const nlohmann::json &j, const Corpus *corpus = nullptr);

struct Suggestion {
  std::string text;
  double logprob = 0.0;
  int token_count = 0;
  bool terminated = false;
  std::set<std::string> covered_titles;
};

struct SuggestOptions {
  int k = 1;
  double temperature = 0.0;
  PromptBudgets budgets;
  std::string step_separator = std::string(kStepSeparator);
  StreamKey stream;
  // When positive, repeated texts are merged (keeping the higher
  // log-probability) and up to this many extra rounds of k draws are spent
  // collecting k distinct steps.
  int distinct_rounds = 0;
};

// Samples k next steps after `history`. Suggestions that are empty without
// ending the proof are dropped, so fewer than k may return. Coverage is
// intersected with `ref_titles` when that list is non-empty.
std::vector<Suggestion> suggest_next_steps(const Reference &theorem,
                                           const std::vector<std::string> &ref_titles,
                                           const std::vector<std::string> &history,
                                           const SuggestOptions &options,
                                           LanguageModel &lm);

struct ScoredSuggestion {
  std::string text;
  double logprob = 0.0;
  MetricReport metrics;
};

struct TheoremEntry {
  int theorem_id = 0;
  // Gold step index for next-step runs, -1 for whole proofs.
  int step_index = -1;
  std::vector<std::string> generated_steps;
  std::string generated;
  MetricReport metrics;
  nlohmann::json trace_summary;
  // Next-step runs: every scored suggestion and the index selected.
  std::vector<ScoredSuggestion> suggestions;
  int selected = -1;

  nlohmann::json to_json() const;
};

struct TheoremFailure {
  int theorem_id = 0;
  std::string error;
  bool retryable = false;
};

struct RunReport {
  Task task = Task::kFullProof;
  KnowledgeSetting setting = KnowledgeSetting::kProvided;
  uint64_t seed = 0;
  nlohmann::json config;
  std::vector<TheoremEntry> entries;
  std::vector<TheoremFailure> failures;
  // Theorems attempted, failed ones included.
  size_t theorems = 0;
  // Arithmetic means over `entries`.
  MetricReport means;
  CostSnapshot cost;

  nlohmann::json to_json() const;
  // Header of metric names plus entry count, one row of means.
  std::string means_csv() const;
  // One row per entry.
  std::string entries_csv() const;
};

// Theorems of the configured split that have gold proofs, restricted to the
// filter when one is given.
std::vector<int> select_theorems(const ExperimentConfig &config, const Corpus &corpus);

// Reference titles a theorem is conditioned on under the configured setting.
std::vector<std::string> knowledge_titles(KnowledgeSetting setting, int theorem_id,
                                          const Corpus &corpus,
                                          const Retrievals *retrievals);

// Both runners record per-theorem backend and decode failures and throw
// HarnessError when more than half of the theorems fail.
RunReport run_full_proof(const ExperimentConfig &config, const Corpus &corpus,
                         LanguageModel &lm, const Retrievals *retrievals = nullptr);
RunReport run_next_step(const ExperimentConfig &config, const Corpus &corpus,
                        LanguageModel &lm, const Retrievals *retrievals = nullptr);
// Dispatches on config.task, loading retrievals when the config names them.
RunReport run_experiment(const ExperimentConfig &config, const Corpus &corpus,
                         LanguageModel &lm);

struct Prediction {
  int theorem_id = 0;
  std::string proof;
};

// JSON-lines {"theorem_id", "proof"}.
std::vector<Prediction> load_predictions(const std::string &path);

// Scores externally generated proofs against the corpus gold proofs.
RunReport score_predictions(const std::vector<Prediction> &predictions,
                            const Corpus &corpus);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::string> automatic;
  std::vector<std::string> human;
  // cells[i][j] for automatic[i] against human[j]; empty when undefined.
  std::vector<std::vector<std::optional<double>>> cells;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Pearson r between every automatic and human metric across the labels
// present on both sides. Error metrics enter negated. Cells are undefined
// with fewer than two matched labels or zero variance.
CorrelationMatrix correlate(
    const std::vector<std::pair<std::string, RunReport>> &runs,
    const std::vector<std::pair<std::string, AggregateReport>> &aggregates);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace groundproof

#endif  // GROUNDPROOF_HARNESS_H_
