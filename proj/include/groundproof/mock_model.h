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

#ifndef GROUNDPROOF_MOCK_MODEL_H_
#define GROUNDPROOF_MOCK_MODEL_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "groundproof/lmbackend.h"
#include "json.hpp"

namespace groundproof {

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScriptedContinuation {
  std::string text;
  double weight = 1.0;
  // When set, sampling continues from the extended context after this
  // segment is emitted, which lets a script describe multi-step proofs as a
  // tree of step-level tables.
  bool continues = false;
};

// Applies to every prompt ending with `suffix`. The longest matching suffix
// wins; the empty suffix matches everything.
struct ScriptRule {
  std::string suffix;
  std::vector<ScriptedContinuation> continuations;
};

// Deterministic segment-level language model driven by a script.
//
// A draw picks one continuation of the matching rule. Weights are normalized
// to probabilities p_i; temperature t samples from p_i^(1/t) renormalized and
// t = 0 takes the most probable entry, breaking ties by text. The reported
// log-probability is always ln p_i of the chosen entries, independent of the
// sampling temperature. A continuation cut by a stop sequence or max_tokens
// keeps the full log-probability of the segments drawn.
//
// Every sample draws from its own stream seeded by (seed, prompt, stream key,
// sample index), so results do not depend on call order or threading.
class MockModel : public LanguageModel {
 public:
  MockModel(std::vector<ScriptRule> rules, uint64_t seed);

  std::vector<SampleResult> sample(const SampleRequest &request) override;
  int count_tokens(std::string_view text) const override {
    return count_whitespace_tokens(text);
  }

  uint64_t seed() const { return seed_; }
  const std::vector<ScriptRule> &rules() const { return rules_; }

  // Probability of `text` as a single continuation after `context`, or 0.
  double probability(std::string_view context, std::string_view text) const;

 private:
  const ScriptRule *match(std::string_view context) const;
  SampleResult draw(const SampleRequest &request, int index) const;

  std::vector<ScriptRule> rules_;
  uint64_t seed_;
};

std::shared_ptr<MockModel> configure_mock(std::vector<ScriptRule> rules,
                                          uint64_t seed);

// {"rules": [{"suffix": "...", "continuations": [{"text", "weight",
// "continue"}]}], "seed": 7}. `seed_override` replaces the file's seed.
std::shared_ptr<MockModel> mock_from_json(const nlohmann::json &script,
                                          std::optional<uint64_t> seed_override = {});
std::shared_ptr<MockModel> load_mock_script(const std::string &path,
                                            std::optional<uint64_t> seed_override = {});

}  // namespace groundproof

#endif  // GROUNDPROOF_MOCK_MODEL_H_
