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

#include "groundproof/remote_model.h"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace groundproof {

using json = nlohmann::json;

namespace {

std::string EnvOr(const char *name, const std::string &fallback) {
  const char *value = std::getenv(name);
  return value != nullptr && *value != '\0' ? std::string(value) : fallback;
}

bool IsSpaceByte(unsigned char c) { return std::isspace(c) != 0; }
bool IsLetterByte(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }
bool IsDigitByte(unsigned char c) { return std::isdigit(c) != 0; }

std::unique_ptr<httplib::Client> MakeClient(const RemoteConfig &config) {
  auto client = std::make_unique<httplib::Client>(config.base_url);
  auto seconds = static_cast<time_t>(config.timeout_seconds);
  auto micros = static_cast<time_t>((config.timeout_seconds - seconds) * 1e6);
  client->set_connection_timeout(seconds, micros);
  client->set_read_timeout(seconds, micros);
  client->set_write_timeout(seconds, micros);
  if (!config.api_key.empty()) client->set_bearer_token_auth(config.api_key);
  return client;
}

SampleResult::Finish ParseFinish(const json &choice) {
  std::string reason = choice.value("finish_reason", std::string());
  if (reason == "length") return SampleResult::Finish::kMaxTokens;
  if (reason == "stop") {
    // vLLM-style servers report which stop string fired, null for EOS.
    if (choice.contains("stop_reason") && choice["stop_reason"].is_null()) {
      return SampleResult::Finish::kEnd;
    }
    return SampleResult::Finish::kStop;
  }
  return SampleResult::Finish::kEnd;
}

std::vector<SampleResult> ParseCompletions(const json &body, int expected) {
  if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array()) {
    throw TerminalError("completion response has no 'choices' array");
  }
  std::vector<std::pair<int, SampleResult>> indexed;
  int position = 0;
  for (const json &choice : body["choices"]) {
    SampleResult r;
    r.text = choice.value("text", std::string());
    r.truncated_by = ParseFinish(choice);
    int tokens = 0;
    if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
      const json &lp = choice["logprobs"];
      if (lp.contains("token_logprobs") && lp["token_logprobs"].is_array()) {
        for (const json &v : lp["token_logprobs"]) {
          if (v.is_number()) r.logprob += v.get<double>();
          ++tokens;
        }
      }
    }
    r.token_count = tokens > 0 ? tokens : estimate_bpe_tokens(r.text);
    r.suspicious_logprob = r.logprob > 0.0;
    indexed.emplace_back(choice.value("index", position), std::move(r));
    ++position;
  }
  std::stable_sort(indexed.begin(), indexed.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  std::vector<SampleResult> results;
  for (auto &entry : indexed) {
    if (static_cast<int>(results.size()) == expected) break;
    results.push_back(std::move(entry.second));
  }
  return results;
}

}  // namespace

RemoteConfig RemoteConfig::FromEnvironment(RemoteConfig base) {
  base.base_url = EnvOr("GROUNDPROOF_ENDPOINT", base.base_url);
  base.completions_path = EnvOr("GROUNDPROOF_COMPLETIONS_PATH", base.completions_path);
  base.tokenize_path = EnvOr("GROUNDPROOF_TOKENIZE_PATH", base.tokenize_path);
  base.model = EnvOr("GROUNDPROOF_MODEL", base.model);
  base.api_key = EnvOr("GROUNDPROOF_API_KEY", EnvOr("OPENAI_API_KEY", base.api_key));
  base.timeout_seconds =
      std::stod(EnvOr("GROUNDPROOF_TIMEOUT", std::to_string(base.timeout_seconds)));
  base.max_retries =
      std::stoi(EnvOr("GROUNDPROOF_MAX_RETRIES", std::to_string(base.max_retries)));
  return base;
}

RemoteConfig RemoteConfig::FromEnvironment() { return FromEnvironment(RemoteConfig()); }

RemoteModel::RemoteModel(RemoteConfig config)
    : config_(std::move(config)),
      sleeper_([](int ms) {
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
      }) {}

std::vector<SampleResult> RemoteModel::sample(const SampleRequest &request) {
  request.validate();
  json body = {
      {"prompt", request.prompt},
      {"temperature", request.temperature},
      {"n", request.n},
      {"max_tokens", request.max_tokens},
      {"logprobs", 1},
  };
  if (!config_.model.empty()) body["model"] = config_.model;
  if (!request.stop_sequences.empty()) body["stop"] = request.stop_sequences;
  const std::string payload = body.dump();

  std::string last_error;
  const int attempts = std::max(1, config_.max_retries + 1);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto client = MakeClient(config_);
    auto response = client->Post(config_.completions_path, payload, "application/json");
    if (!response) {
      last_error = "transport failure: " + httplib::to_string(response.error());
    } else if (response->status == 200) {
      json parsed;
      try {
        parsed = json::parse(response->body);
      } catch (const json::parse_error &e) {
        throw TerminalError(std::string("malformed completion response: ") + e.what(),
                            attempt);
      }
      std::vector<SampleResult> results = ParseCompletions(parsed, request.n);
      cost_.record(results);
      return results;
    } else {
      const int status = response->status;
      const std::string &text = response->body;
      bool quota = text.find("insufficient_quota") != std::string::npos;
      if (status == 401 || status == 403 || (status == 429 && quota)) {
        throw TerminalError("endpoint refused request (HTTP " +
                                std::to_string(status) + "): " + text,
                            attempt);
      }
      if (status != 429 && status < 500) {
        throw TerminalError("endpoint rejected request (HTTP " +
                                std::to_string(status) + "): " + text,
                            attempt);
      }
      last_error = "HTTP " + std::to_string(status) + ": " + text;
    }
    if (attempt < attempts) sleeper_(config_.backoff_ms * (1 << (attempt - 1)));
  }
  throw TransportError(last_error + " after " + std::to_string(attempts) + " attempts",
                       attempts);
}

int RemoteModel::count_tokens(std::string_view text) const {
  if (!config_.tokenize_path.empty()) {
    auto client = MakeClient(config_);
    json body = {{"content", std::string(text)}};
    if (!config_.model.empty()) body["model"] = config_.model;
    auto response = client->Post(config_.tokenize_path, body.dump(), "application/json");
    if (response && response->status == 200) {
      try {
        json parsed = json::parse(response->body);
        if (parsed.contains("tokens") && parsed["tokens"].is_array()) {
          return static_cast<int>(parsed["tokens"].size());
        }
        if (parsed.contains("count") && parsed["count"].is_number_integer()) {
          return parsed["count"].get<int>();
        }
      } catch (const json::exception &) {
      }
    }
  }
  return estimate_bpe_tokens(text);
}

int estimate_bpe_tokens(std::string_view text) {
  int count = 0;
  size_t i = 0;
  const size_t n = text.size();
  auto at = [&](size_t k) { return static_cast<unsigned char>(text[k]); };
  while (i < n) {
    if (at(i) == ' ' && i + 1 < n && !IsSpaceByte(at(i + 1))) ++i;
    unsigned char c = at(i);
    if (IsLetterByte(c)) {
      while (i < n && IsLetterByte(at(i))) ++i;
    } else if (IsDigitByte(c)) {
      while (i < n && IsDigitByte(at(i))) ++i;
    } else if (IsSpaceByte(c)) {
      size_t start = i;
      while (i < n && IsSpaceByte(at(i))) ++i;
      // Leave one space to prefix the following word.
      if (i < n && i - start > 1 && at(i - 1) == ' ') --i;
    } else {
      while (i < n && !IsSpaceByte(at(i)) && !IsLetterByte(at(i)) && !IsDigitByte(at(i))) ++i;
    }
    ++count;
  }
  return count;
}

}  // namespace groundproof
