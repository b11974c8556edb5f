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

#include "groundproof/lmbackend.h"

#include <thread>

namespace groundproof {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

void SampleRequest::validate() const {
  if (n < 1) throw TerminalError("sample request needs n >= 1");
  if (max_tokens < 1) throw TerminalError("sample request needs max_tokens >= 1");
  if (!(temperature >= 0.0)) {
    throw TerminalError("sample request needs a non-negative temperature");
  }
}

const char *FinishName(SampleResult::Finish finish) {
  switch (finish) {
    case SampleResult::Finish::kStop: return "stop";
    case SampleResult::Finish::kMaxTokens: return "max_tokens";
    case SampleResult::Finish::kEnd: return "end";
  }
  return "end";
}

void CostMeter::record(const std::vector<SampleResult> &results) {
  uint64_t tokens = 0;
  for (const SampleResult &r : results) tokens += static_cast<uint64_t>(r.token_count);
  calls_.fetch_add(1, std::memory_order_relaxed);
  samples_.fetch_add(results.size(), std::memory_order_relaxed);
  generated_tokens_.fetch_add(tokens, std::memory_order_relaxed);
}

CostSnapshot CostMeter::snapshot() const {
  return {calls_.load(), samples_.load(), generated_tokens_.load()};
}

int count_whitespace_tokens(std::string_view text) {
  int count = 0;
  bool in_token = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

bool truncate_at_stop(std::string &text, const std::vector<std::string> &stops) {
  size_t cut = std::string::npos;
  for (const std::string &stop : stops) {
    if (stop.empty()) continue;
    cut = std::min(cut, text.find(stop));
  }
  if (cut == std::string::npos) return false;
  text.resize(cut);
  return true;
}

bool truncate_to_tokens(std::string &text, int max_tokens) {
  int count = 0;
  bool in_token = false;
  for (size_t i = 0; i < text.size(); ++i) {
    if (IsSpace(text[i])) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      if (++count > max_tokens) {
        text.resize(i);
        return true;
      }
    }
  }
  return false;
}

RateLimitedModel::RateLimitedModel(std::shared_ptr<LanguageModel> inner,
                                   int max_in_flight, int per_minute)
    : inner_(std::move(inner)),
      max_in_flight_(max_in_flight),
      per_minute_(per_minute) {}

void RateLimitedModel::acquire() {
  using Clock = std::chrono::steady_clock;
  std::unique_lock lock(mu_);
  for (;;) {
    auto now = Clock::now();
    while (!recent_.empty() && now - recent_.front() >= std::chrono::minutes(1)) {
      recent_.pop_front();
    }
    bool slot = max_in_flight_ <= 0 || in_flight_ < max_in_flight_;
    bool budget = per_minute_ <= 0 || static_cast<int>(recent_.size()) < per_minute_;
    if (slot && budget) break;
    if (!budget) {
      cv_.wait_until(lock, recent_.front() + std::chrono::minutes(1));
    } else {
      cv_.wait(lock);
    }
  }
  ++in_flight_;
  if (per_minute_ > 0) recent_.push_back(Clock::now());
}

void RateLimitedModel::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_all();
}

std::vector<SampleResult> RateLimitedModel::sample(const SampleRequest &request) {
  acquire();
  try {
    std::vector<SampleResult> results = inner_->sample(request);
    release();
    cost_.record(results);
    return results;
  } catch (...) {
    release();
    throw;
  }
}

}  // namespace groundproof
