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

#ifndef GROUNDPROOF_REMOTE_MODEL_H_
#define GROUNDPROOF_REMOTE_MODEL_H_

#include <functional>
#include <string>

#include "groundproof/lmbackend.h"

namespace groundproof {

// Connection settings for a completions endpoint.
struct RemoteConfig {
  // Scheme, host and optional port, e.g. "https://api.openai.com".
  std::string base_url = "http://127.0.0.1:8000";
  std::string completions_path = "/v1/completions";
  // When non-empty, POST {"content": text} here and count the returned
  // "tokens" array. Otherwise counts are estimated locally.
  std::string tokenize_path;
  std::string model;
  std::string api_key;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int backoff_ms = 500;

  // Reads GROUNDPROOF_ENDPOINT, GROUNDPROOF_COMPLETIONS_PATH,
  // GROUNDPROOF_TOKENIZE_PATH, GROUNDPROOF_MODEL, GROUNDPROOF_API_KEY
  // (falling back to OPENAI_API_KEY), GROUNDPROOF_TIMEOUT and
  // GROUNDPROOF_MAX_RETRIES on top of `base`.
  static RemoteConfig FromEnvironment(RemoteConfig base);
  static RemoteConfig FromEnvironment();
};

// Client for OpenAI-style completion endpoints. Requests ask for per-token
// log-probabilities and report their sum.
class RemoteModel : public LanguageModel {
 public:
  explicit RemoteModel(RemoteConfig config);

  std::vector<SampleResult> sample(const SampleRequest &request) override;
  int count_tokens(std::string_view text) const override;

  const RemoteConfig &config() const { return config_; }

  // Replaces the sleep between retries; tests use it to avoid waiting.
  void set_sleeper(std::function<void(int)> sleeper) { sleeper_ = std::move(sleeper); }

 private:
  RemoteConfig config_;
  std::function<void(int)> sleeper_;
};

// Approximates a byte-pair tokenizer by counting pre-tokenization pieces:
// letter runs, digit runs, punctuation runs, each optionally carrying one
// leading space, plus leftover whitespace runs.
int estimate_bpe_tokens(std::string_view text);

}  // namespace groundproof

#endif  // GROUNDPROOF_REMOTE_MODEL_H_
