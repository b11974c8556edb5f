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

#ifndef GROUNDPROOF_PROMPTGEN_H_
#define GROUNDPROOF_PROMPTGEN_H_

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "groundproof/corpus.h"

namespace groundproof {

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token budgets applied at inference time.
struct PromptBudgets {
  int max_prompt_tokens = 1024;
  int max_full_proof_tokens = 1020;
  int max_history_tokens = 900;
  int max_step_tokens = 120;

  void validate() const;
};

inline constexpr std::string_view kProofOpen = "<proof>";
inline constexpr std::string_view kProofClose = "</proof>";

// A prompt/completion pair. The training loss applies to the completion.
struct FinetuneRecord {
  enum class Kind { kProofExample, kReconstruction };

  std::string prompt;
  std::string completion;
  Kind kind = Kind::kProofExample;
};

// Which reference titles accompany each theorem.
enum class KnowledgeSetting { kNone, kRetrieved, kProvided };

const char *KnowledgeSettingName(KnowledgeSetting setting);
std::optional<KnowledgeSetting> ParseKnowledgeSetting(std::string_view name);

// theorem id -> reference titles in retrieval rank order.
using Retrievals = std::map<int, std::vector<std::string>>;

inline constexpr size_t kRetrievedTitles = 20;

using TokenCounter = std::function<int(std::string_view)>;

// "<theorem> <title> T </title> <content> C </content> </theorem>" followed by
// one "<ref> title </ref>" block per title and "<proof>".
std::string render_theorem_prompt(const Reference &theorem,
                                  const std::vector<std::string> &ref_titles);

// Steps joined by the step separator.
std::string serialize_steps(const std::vector<ProofStep> &steps,
                            std::string_view separator = kStepSeparator);
std::string serialize_steps(const std::vector<std::string> &steps,
                            std::string_view separator = kStepSeparator);

FinetuneRecord render_proof_example(const Reference &theorem,
                                    const std::vector<std::string> &ref_titles,
                                    const ProofDocument &proof);

FinetuneRecord render_reconstruction(const Reference &reference);

// Training references are all corpus pages except theorems held out in the
// valid or test split.
std::vector<const Reference *> training_references(const Corpus &corpus);

std::vector<FinetuneRecord> build_finetune_records(
    const Corpus &corpus, KnowledgeSetting setting,
    const Retrievals *retrievals);

// Writes JSON-lines {"prompt", "completion"} and returns the record count.
size_t emit_finetune_file(const Corpus &corpus, KnowledgeSetting setting,
                          const Retrievals *retrievals,
                          const std::string &out_path);

// Builds the inference prompt under `budgets`. Reference blocks are dropped
// from the end first, then theorem content is cut from its tail. History is
// appended whole steps at a time, most recent kept, followed by the step
// separator so that the model continues with the next step.
std::string render_inference_prompt(
    const Reference &theorem, const std::vector<std::string> &ref_titles,
    const std::optional<std::vector<std::string>> &proof_so_far,
    const PromptBudgets &budgets, const TokenCounter &count_tokens,
    std::string_view separator = kStepSeparator);

// Fields recovered from a serialized proof example.
struct ParsedProofExample {
  std::string title;
  std::string content;
  std::vector<std::string> ref_titles;
  std::string proof;
};

std::optional<ParsedProofExample> parse_proof_example(std::string_view text);

}  // namespace groundproof

#endif  // GROUNDPROOF_PROMPTGEN_H_
