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

#ifndef GROUNDPROOF_DECODER_H_
#define GROUNDPROOF_DECODER_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "groundproof/corpus.h"
#include "groundproof/lmbackend.h"
#include "groundproof/promptgen.h"
#include "json.hpp"

namespace groundproof {

enum class DecodeMode { kGreedy, kRerank, kStepwise, kStepwisePP };

const char *DecodeModeName(DecodeMode mode);
std::optional<DecodeMode> ParseDecodeMode(std::string_view name);

struct TemperatureGroup {
  int count = 1;
  double temperature = 0.0;
};

// Search hyperparameters. Defaults are the stepwise++ settings: beam of 9,
// ten expansions per prefix drawn at four temperatures, three selection
// clusters, final pick at alpha 0.75.
struct DecodeConfig {
  DecodeMode mode = DecodeMode::kStepwisePP;
  int beam_size = 9;
  int expansions = 10;
  std::vector<TemperatureGroup> temperature_schedule = {
      {1, 0.0}, {3, 0.3}, {3, 0.5}, {3, 0.7}};
  std::vector<double> alpha_clusters = {0.1, 0.5, 1.0};
  double final_alpha = 0.75;
  // Value weight for plain stepwise search.
  double stepwise_alpha = 0.75;
  int rerank_n = 10;
  double rerank_temperature = 0.3;
  int max_steps = 50;
  std::string step_separator = std::string(kStepSeparator);
  PromptBudgets budgets;
  // Issue the sample calls of one iteration concurrently.
  bool parallel = false;

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;

  // Temperature used by plain stepwise search: the schedule entry with the
  // largest count, first one on ties.
  double modal_temperature() const;

  // Beam slots per alpha cluster (K / l each, remainder one per cluster
  // starting from the largest alpha), in cluster order.
  std::vector<int> cluster_quotas() const;

  nlohmann::json to_json() const;
  // Missing keys keep their defaults.
  static DecodeConfig FromJson(const nlohmann::json &j);
};

// A partial proof in the beam.
struct Candidate {
  std::vector<std::string> steps;
  double cum_logprob = 0.0;
  bool terminated = false;
  // Terminated by the step cap rather than by the model.
  bool forced = false;
  // Normalized titles of every mention in `steps`.
  std::set<std::string> covered_titles;

  static Candidate Make(std::vector<std::string> steps, double cum_logprob,
                        bool terminated);
  void recompute_coverage();
  std::string text(std::string_view separator = kStepSeparator) const;
};

// Number of distinct constraint titles the candidate mentions.
int v_constraint(const Candidate &candidate,
                 const std::set<std::string> &constraint_titles);

// alpha * c / max|c| + (1 - alpha) * l / max|l| per candidate, where c is the
// constraint count and l the cumulative log-probability; maxima are taken
// over the given set and floored at 1e-12.
std::vector<double> score_candidates(std::span<const Candidate> candidates,
                                     const std::set<std::string> &constraint_titles,
                                     double alpha);

// Indices of `candidates` sorted by value, then log-probability, then text.
std::vector<size_t> rank_candidates(std::span<const Candidate> candidates,
                                    std::span<const double> scores);

struct TraceCandidate {
  std::string text;
  double cum_logprob = 0.0;
  int coverage = 0;
  bool terminated = false;
  // One value per selection cluster.
  std::vector<double> scores;
  bool selected = false;
};

struct TraceIteration {
  int index = 0;
  // Beam members expanded this iteration.
  int expanded_prefixes = 0;
  // Segments sampled this iteration.
  int expansions = 0;
  int degenerate = 0;
  std::vector<TraceCandidate> candidates;
};

struct SearchTrace {
  DecodeMode mode = DecodeMode::kGreedy;
  std::vector<TraceIteration> iterations;
  int expansions = 0;
  uint64_t generated_tokens = 0;
  bool degenerate = false;
  bool forced = false;
  bool exhausted = false;
  bool fewer_than_k_terminated = false;

  nlohmann::json to_json() const;
  // Counts only, for reports.
  nlohmann::json summary() const;
};

// A decode failure with the search state reached so far.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string &message, SearchTrace trace, bool retryable = false)
      : std::runtime_error(message), trace_(std::move(trace)), retryable_(retryable) {}

  const SearchTrace &trace() const { return trace_; }
  bool retryable() const { return retryable_; }

 private:
  SearchTrace trace_;
  bool retryable_;
};

struct DecodeResult {
  Candidate proof;
  SearchTrace trace;
};

// The theorem to prove and the reference titles placed in its prompt; the
// same titles form the constraint set.
struct DecodeTask {
  const Reference *theorem = nullptr;
  std::vector<std::string> ref_titles;
};

DecodeResult decode_greedy(const DecodeTask &task, LanguageModel &lm,
                           const DecodeConfig &config);
DecodeResult decode_rerank(const DecodeTask &task, LanguageModel &lm,
                           const DecodeConfig &config);
DecodeResult decode_stepwise(const DecodeTask &task, LanguageModel &lm,
                             const DecodeConfig &config, double alpha);
DecodeResult decode_stepwisepp(const DecodeTask &task, LanguageModel &lm,
                               const DecodeConfig &config);

// Dispatches on config.mode; plain stepwise uses config.stepwise_alpha.
DecodeResult decode(const DecodeTask &task, LanguageModel &lm,
                    const DecodeConfig &config);

}  // namespace groundproof

#endif  // GROUNDPROOF_DECODER_H_
