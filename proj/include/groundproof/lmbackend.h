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

#ifndef GROUNDPROOF_LMBACKEND_H_
#define GROUNDPROOF_LMBACKEND_H_

#include <atomic>
#include <condition_variable>
#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace groundproof {

// Base class for sampler failures.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string &message, bool retryable, int attempts)
      : std::runtime_error(message), retryable_(retryable), attempts_(attempts) {}

  bool retryable() const { return retryable_; }
  int attempts() const { return attempts_; }

 private:
  bool retryable_;
  int attempts_;
};

// Network failures and server errors; the request may be retried.
class TransportError : public BackendError {
 public:
  TransportError(const std::string &message, int attempts)
      : BackendError(message, true, attempts) {}
};

// Authentication, quota and contract violations; retrying will not help.
class TerminalError : public BackendError {
 public:
  explicit TerminalError(const std::string &message, int attempts = 1)
      : BackendError(message, false, attempts) {}
};

// Identifies the call site of a sample request so that seeded backends draw
// from a stream that does not depend on call order.
struct StreamKey {
  uint64_t iteration = 0;
  uint64_t beam = 0;
  uint64_t sample = 0;
};

struct SampleRequest {
  std::string prompt;
  double temperature = 0.0;
  int n = 1;
  int max_tokens = 128;
  std::vector<std::string> stop_sequences;
  StreamKey stream;

  // Throws TerminalError when n < 1, max_tokens < 1 or temperature < 0.
  void validate() const;
};

struct SampleResult {
  enum class Finish { kStop, kMaxTokens, kEnd };

  std::string text;
  // Sum of token log-probabilities of `text`.
  double logprob = 0.0;
  int token_count = 0;
  Finish truncated_by = Finish::kEnd;
  // Set when a remote backend reported a positive log-probability.
  bool suspicious_logprob = false;
};

const char *FinishName(SampleResult::Finish finish);

// Running totals of generated work. Only successful calls are counted.
struct CostSnapshot {
  uint64_t calls = 0;
  uint64_t samples = 0;
  uint64_t generated_tokens = 0;
};

class CostMeter {
 public:
  void record(const std::vector<SampleResult> &results);
  CostSnapshot snapshot() const;

 private:
  std::atomic<uint64_t> calls_{0};
  std::atomic<uint64_t> samples_{0};
  std::atomic<uint64_t> generated_tokens_{0};
};

// The sampler contract: prompt in, text and summed log-probability out.
// Implementations must tolerate concurrent calls.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::vector<SampleResult> sample(const SampleRequest &request) = 0;
  virtual int count_tokens(std::string_view text) const = 0;

  const CostMeter &cost() const { return cost_; }

 protected:
  CostMeter cost_;
};

// Number of whitespace-delimited pieces.
int count_whitespace_tokens(std::string_view text);

// Cuts `text` at the earliest stop sequence. Returns true when one was found.
bool truncate_at_stop(std::string &text, const std::vector<std::string> &stops);

// Keeps the first `max_tokens` whitespace-delimited pieces, including the
// whitespace between them. Returns true when text was removed.
bool truncate_to_tokens(std::string &text, int max_tokens);

// Bounds concurrency and request rate of a wrapped model: at most
// `max_in_flight` concurrent calls and `per_minute` calls in any sliding
// 60 second window. Zero disables a limit.
class RateLimitedModel : public LanguageModel {
 public:
  RateLimitedModel(std::shared_ptr<LanguageModel> inner, int max_in_flight,
                   int per_minute);

  std::vector<SampleResult> sample(const SampleRequest &request) override;
  int count_tokens(std::string_view text) const override {
    return inner_->count_tokens(text);
  }

 private:
  void acquire();
  void release();

  std::shared_ptr<LanguageModel> inner_;
  int max_in_flight_;
  int per_minute_;
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  std::deque<std::chrono::steady_clock::time_point> recent_;
};

}  // namespace groundproof

#endif  // GROUNDPROOF_LMBACKEND_H_
