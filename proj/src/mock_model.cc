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

#include "groundproof/mock_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace groundproof {

namespace {

constexpr int kMaxSegmentsPerSample = 4096;

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t Mix(uint64_t a, uint64_t b) { return SplitMix64(a ^ SplitMix64(b)); }

double UnitInterval(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string Tail(std::string_view s, size_t n) {
  return std::string(s.size() > n ? s.substr(s.size() - n) : s);
}

}  // namespace

MockModel::MockModel(std::vector<ScriptRule> rules, uint64_t seed)
    : rules_(std::move(rules)), seed_(seed) {
  std::set<std::string> suffixes;
  for (const ScriptRule &rule : rules_) {
    if (!suffixes.insert(rule.suffix).second) {
      throw ScriptError("duplicate script suffix '" + rule.suffix + "'");
    }
    if (rule.continuations.empty()) {
      throw ScriptError("script rule '" + rule.suffix + "' has no continuations");
    }
    for (const ScriptedContinuation &c : rule.continuations) {
      if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
        throw ScriptError("script rule '" + rule.suffix +
                          "' has a non-positive weight");
      }
    }
  }
}

const ScriptRule *MockModel::match(std::string_view context) const {
  const ScriptRule *best = nullptr;
  for (const ScriptRule &rule : rules_) {
    if (!context.ends_with(rule.suffix)) continue;
    if (best == nullptr || rule.suffix.size() > best->suffix.size()) best = &rule;
  }
  return best;
}

double MockModel::probability(std::string_view context, std::string_view text) const {
  const ScriptRule *rule = match(context);
  if (rule == nullptr) return 0.0;
  double total = 0.0, mass = 0.0;
  for (const ScriptedContinuation &c : rule->continuations) {
    total += c.weight;
    if (c.text == text) mass += c.weight;
  }
  return mass / total;
}

SampleResult MockModel::draw(const SampleRequest &request, int index) const {
  std::mt19937_64 rng(Mix(Mix(Mix(Mix(seed_, Fnv1a(request.prompt)),
                                  request.stream.iteration),
                              request.stream.beam),
                          request.stream.sample + static_cast<uint64_t>(index)));
  SampleResult result;
  std::string context = request.prompt;
  const size_t prompt_size = context.size();

  for (int segment = 0; segment < kMaxSegmentsPerSample; ++segment) {
    const ScriptRule *rule = match(context);
    if (rule == nullptr) {
      if (segment == 0) {
        throw TerminalError("unscripted prompt: ..." + Tail(context, 80));
      }
      break;
    }
    const auto &table = rule->continuations;
    double total = 0.0;
    for (const ScriptedContinuation &c : table) total += c.weight;

    size_t chosen = 0;
    if (request.temperature == 0.0) {
      for (size_t i = 1; i < table.size(); ++i) {
        if (table[i].weight > table[chosen].weight ||
            (table[i].weight == table[chosen].weight &&
             table[i].text < table[chosen].text)) {
          chosen = i;
        }
      }
    } else {
      // p_i^(1/t) in log space so that small temperatures do not underflow.
      std::vector<double> scaled(table.size());
      double top = -INFINITY;
      for (size_t i = 0; i < table.size(); ++i) {
        scaled[i] = std::log(table[i].weight / total) / request.temperature;
        top = std::max(top, scaled[i]);
      }
      double norm = 0.0;
      for (double &s : scaled) {
        s = std::exp(s - top);
        norm += s;
      }
      double u = UnitInterval(rng) * norm;
      chosen = table.size() - 1;
      for (size_t i = 0; i < table.size(); ++i) {
        if (u < scaled[i]) {
          chosen = i;
          break;
        }
        u -= scaled[i];
      }
    }

    const ScriptedContinuation &c = table[chosen];
    result.logprob += std::log(c.weight / total);
    context += c.text;

    std::string generated = context.substr(prompt_size);
    if (truncate_at_stop(generated, request.stop_sequences)) {
      result.text = std::move(generated);
      result.truncated_by = SampleResult::Finish::kStop;
      break;
    }
    if (truncate_to_tokens(generated, request.max_tokens)) {
      result.text = std::move(generated);
      result.truncated_by = SampleResult::Finish::kMaxTokens;
      break;
    }
    result.text = std::move(generated);
    result.truncated_by = SampleResult::Finish::kEnd;
    if (!c.continues) break;
  }
  result.token_count = count_whitespace_tokens(result.text);
  return result;
}

std::vector<SampleResult> MockModel::sample(const SampleRequest &request) {
  request.validate();
  std::vector<SampleResult> results;
  results.reserve(static_cast<size_t>(request.n));
  for (int i = 0; i < request.n; ++i) results.push_back(draw(request, i));
  cost_.record(results);
  return results;
}

std::shared_ptr<MockModel> configure_mock(std::vector<ScriptRule> rules,
                                          uint64_t seed) {
  return std::make_shared<MockModel>(std::move(rules), seed);
}

std::shared_ptr<MockModel> mock_from_json(const nlohmann::json &script,
                                          std::optional<uint64_t> seed_override) {
  if (!script.is_object() || !script.contains("rules") ||
      !script["rules"].is_array()) {
    throw ScriptError("mock script needs a 'rules' array");
  }
  std::vector<ScriptRule> rules;
  for (const auto &r : script["rules"]) {
    ScriptRule rule;
    rule.suffix = r.value("suffix", "");
    if (!r.contains("continuations") || !r["continuations"].is_array()) {
      throw ScriptError("script rule '" + rule.suffix +
                        "' needs a 'continuations' array");
    }
    for (const auto &c : r["continuations"]) {
      ScriptedContinuation cont;
      cont.text = c.at("text").get<std::string>();
      cont.weight = c.value("weight", 1.0);
      cont.continues = c.value("continue", false);
      rule.continuations.push_back(std::move(cont));
    }
    rules.push_back(std::move(rule));
  }
  uint64_t seed = seed_override.value_or(script.value("seed", uint64_t{0}));
  return configure_mock(std::move(rules), seed);
}

std::shared_ptr<MockModel> load_mock_script(const std::string &path,
                                            std::optional<uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ScriptError("cannot open mock script '" + path + "'");
  nlohmann::json script;
  try {
    in >> script;
  } catch (const nlohmann::json::exception &e) {
    throw ScriptError("mock script '" + path + "' is not valid JSON: " + e.what());
  }
  return mock_from_json(script, seed_override);
}

}  // namespace groundproof
