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

#include "groundproof/decoder.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

namespace groundproof {

using json = nlohmann::json;

namespace {

constexpr double kNormFloor = 1e-12;

std::string_view Trim(std::string_view s) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::set<std::string> NormalizeTitles(const std::vector<std::string> &titles) {
  std::set<std::string> out;
  for (const std::string &t : titles) out.insert(normalize_title(t));
  return out;
}

std::vector<std::string> SplitSteps(std::string_view text, std::string_view sep) {
  std::vector<std::string> steps;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t next = text.find(sep, pos);
    if (next == std::string_view::npos) next = text.size();
    std::string_view step = Trim(text.substr(pos, next - pos));
    if (!step.empty()) steps.emplace_back(step);
    pos = next + sep.size();
  }
  return steps;
}

TraceCandidate ToTrace(const Candidate &c, const std::set<std::string> &constraints,
                       std::string_view sep) {
  TraceCandidate t;
  t.text = c.text(sep);
  t.cum_logprob = c.cum_logprob;
  t.coverage = v_constraint(c, constraints);
  t.terminated = c.terminated;
  return t;
}

size_t Argmax(std::span<const Candidate> candidates, std::span<const double> scores) {
  return rank_candidates(candidates, scores).front();
}

DecodeResult FullProofSearch(const DecodeTask &task, LanguageModel &lm,
                             const DecodeConfig &config, bool greedy) {
  config.validate();
  SearchTrace trace;
  trace.mode = greedy ? DecodeMode::kGreedy : DecodeMode::kRerank;
  const std::set<std::string> constraints = NormalizeTitles(task.ref_titles);

  SampleRequest request;
  request.temperature = greedy ? 0.0 : config.rerank_temperature;
  request.n = greedy ? 1 : config.rerank_n;
  request.max_tokens = config.budgets.max_full_proof_tokens;
  request.stop_sequences = {std::string(kProofClose)};

  std::vector<SampleResult> results;
  try {
    request.prompt = render_inference_prompt(
        *task.theorem, task.ref_titles, std::nullopt, config.budgets,
        [&lm](std::string_view s) { return lm.count_tokens(s); },
        config.step_separator);
    results = lm.sample(request);
  } catch (const BackendError &e) {
    throw DecodeError(e.what(), trace, e.retryable());
  } catch (const PromptError &e) {
    throw DecodeError(e.what(), trace);
  }

  TraceIteration iteration;
  iteration.expanded_prefixes = 1;
  iteration.expansions = static_cast<int>(results.size());
  std::vector<Candidate> candidates;
  for (const SampleResult &r : results) {
    trace.generated_tokens += static_cast<uint64_t>(r.token_count);
    Candidate c = Candidate::Make(SplitSteps(r.text, config.step_separator),
                                  r.logprob, true);
    c.forced = r.truncated_by == SampleResult::Finish::kMaxTokens;
    candidates.push_back(std::move(c));
  }
  trace.expansions = iteration.expansions;

  if (greedy) {
    Candidate proof = std::move(candidates.front());
    trace.degenerate = proof.steps.empty();
    trace.forced = proof.forced;
    TraceCandidate t = ToTrace(proof, constraints, config.step_separator);
    t.selected = true;
    iteration.candidates.push_back(std::move(t));
    trace.iterations.push_back(std::move(iteration));
    return {std::move(proof), std::move(trace)};
  }

  std::vector<Candidate> viable;
  for (Candidate &c : candidates) {
    if (c.steps.empty()) {
      ++iteration.degenerate;
    } else {
      viable.push_back(std::move(c));
    }
  }
  if (viable.empty()) {
    trace.degenerate = true;
    trace.iterations.push_back(std::move(iteration));
    throw DecodeError("no viable proof: all samples were empty", trace);
  }
  std::vector<double> scores = score_candidates(viable, constraints, config.final_alpha);
  size_t best = Argmax(viable, scores);
  for (size_t i = 0; i < viable.size(); ++i) {
    TraceCandidate t = ToTrace(viable[i], constraints, config.step_separator);
    t.scores = {scores[i]};
    t.selected = i == best;
    iteration.candidates.push_back(std::move(t));
  }
  trace.forced = viable[best].forced;
  trace.iterations.push_back(std::move(iteration));
  return {std::move(viable[best]), std::move(trace)};
}

struct ExpansionJob {
  size_t beam_index;
  SampleRequest request;
};

// Stepwise beam search over proof steps. Every non-terminated beam member is
// expanded with samples drawn per `schedule`; the next beam is the union of
// the top-quota candidates under each alpha in `alphas`.
DecodeResult SegmentSearch(const DecodeTask &task, LanguageModel &lm,
                           const DecodeConfig &config, DecodeMode mode,
                           const std::vector<TemperatureGroup> &schedule,
                           const std::vector<double> &alphas,
                           const std::vector<int> &quotas, double final_alpha) {
  SearchTrace trace;
  trace.mode = mode;
  const std::set<std::string> constraints = NormalizeTitles(task.ref_titles);
  const std::string &sep = config.step_separator;
  auto counter = [&lm](std::string_view s) { return lm.count_tokens(s); };

  std::vector<Candidate> beam{Candidate::Make({}, 0.0, false)};
  std::vector<Candidate> terminated_seen;

  for (int step = 0; step < config.max_steps; ++step) {
    bool open = std::any_of(beam.begin(), beam.end(),
                            [](const Candidate &c) { return !c.terminated; });
    if (!open) break;

    TraceIteration iteration;
    iteration.index = step;

    std::vector<ExpansionJob> jobs;
    for (size_t b = 0; b < beam.size(); ++b) {
      if (beam[b].terminated) continue;
      ++iteration.expanded_prefixes;
      std::optional<std::vector<std::string>> history;
      if (!beam[b].steps.empty()) history = beam[b].steps;
      std::string prompt;
      try {
        prompt = render_inference_prompt(*task.theorem, task.ref_titles, history,
                                         config.budgets, counter, sep);
      } catch (const PromptError &e) {
        throw DecodeError(e.what(), trace);
      }
      uint64_t offset = 0;
      for (const TemperatureGroup &group : schedule) {
        ExpansionJob job{b, {}};
        job.request.prompt = prompt;
        job.request.temperature = group.temperature;
        job.request.n = group.count;
        job.request.max_tokens = config.budgets.max_step_tokens;
        job.request.stop_sequences = {sep};
        job.request.stream = {static_cast<uint64_t>(step), b, offset};
        offset += static_cast<uint64_t>(group.count);
        jobs.push_back(std::move(job));
      }
    }

    std::vector<std::vector<SampleResult>> outputs(jobs.size());
    try {
      if (config.parallel && jobs.size() > 1) {
        std::vector<std::future<std::vector<SampleResult>>> futures;
        futures.reserve(jobs.size());
        for (const ExpansionJob &job : jobs) {
          futures.push_back(std::async(std::launch::async,
                                       [&lm, &job] { return lm.sample(job.request); }));
        }
        std::exception_ptr first_error;
        for (size_t j = 0; j < futures.size(); ++j) {
          try {
            outputs[j] = futures[j].get();
          } catch (...) {
            if (!first_error) first_error = std::current_exception();
          }
        }
        if (first_error) std::rethrow_exception(first_error);
      } else {
        for (size_t j = 0; j < jobs.size(); ++j) outputs[j] = lm.sample(jobs[j].request);
      }
    } catch (const BackendError &e) {
      throw DecodeError(e.what(), trace, e.retryable());
    }

    // Expand, then merge duplicates keeping the highest log-probability.
    std::vector<Candidate> pool;
    std::map<std::pair<std::string, bool>, size_t> seen;
    auto add = [&](Candidate c) {
      auto key = std::make_pair(c.text(sep), c.terminated);
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(std::move(key), pool.size());
        pool.push_back(std::move(c));
      } else if (c.cum_logprob > pool[it->second].cum_logprob) {
        pool[it->second] = std::move(c);
      }
    };
    for (size_t j = 0; j < jobs.size(); ++j) {
      const Candidate &parent = beam[jobs[j].beam_index];
      for (const SampleResult &r : outputs[j]) {
        ++iteration.expansions;
        trace.generated_tokens += static_cast<uint64_t>(r.token_count);
        std::string text = r.text;
        bool done = r.truncated_by == SampleResult::Finish::kEnd;
        if (size_t close = text.find(kProofClose); close != std::string::npos) {
          text.resize(close);
          done = true;
        }
        std::string_view body = Trim(text);
        if (body.empty() && !done) {
          ++iteration.degenerate;
          continue;
        }
        std::vector<std::string> steps = parent.steps;
        if (!body.empty()) steps.emplace_back(body);
        add(Candidate::Make(std::move(steps), parent.cum_logprob + r.logprob, done));
      }
    }
    for (const Candidate &c : beam) {
      if (c.terminated) add(c);
    }
    trace.expansions += iteration.expansions;

    if (pool.empty()) {
      trace.exhausted = true;
      trace.iterations.push_back(std::move(iteration));
      break;
    }

    std::vector<std::vector<double>> scores;
    std::vector<bool> selected(pool.size(), false);
    std::vector<size_t> order_selected;
    for (size_t k = 0; k < alphas.size(); ++k) {
      scores.push_back(score_candidates(pool, constraints, alphas[k]));
      std::vector<size_t> ranked = rank_candidates(pool, scores.back());
      for (int q = 0; q < quotas[k] && q < static_cast<int>(ranked.size()); ++q) {
        size_t idx = ranked[static_cast<size_t>(q)];
        if (!selected[idx]) {
          selected[idx] = true;
          order_selected.push_back(idx);
        }
      }
    }

    for (size_t i = 0; i < pool.size(); ++i) {
      TraceCandidate t = ToTrace(pool[i], constraints, sep);
      for (const auto &s : scores) t.scores.push_back(s[i]);
      t.selected = selected[i];
      iteration.candidates.push_back(std::move(t));
    }
    trace.iterations.push_back(std::move(iteration));

    std::vector<Candidate> next;
    next.reserve(order_selected.size());
    for (size_t idx : order_selected) next.push_back(pool[idx]);
    beam = std::move(next);

    if (step + 1 == config.max_steps) {
      for (Candidate &c : beam) {
        if (!c.terminated) {
          c.terminated = true;
          c.forced = true;
          trace.forced = true;
        }
      }
    }
    for (const Candidate &c : beam) {
      if (c.terminated) terminated_seen.push_back(c);
    }
  }

  std::vector<Candidate> finals;
  for (const Candidate &c : beam) {
    if (c.terminated) finals.push_back(c);
  }
  if (finals.empty()) finals = terminated_seen;
  if (finals.empty()) {
    throw DecodeError("beam exhausted without a terminated proof", trace);
  }
  trace.fewer_than_k_terminated = static_cast<int>(finals.size()) < config.beam_size;

  std::vector<double> final_scores = score_candidates(finals, constraints, final_alpha);
  size_t best = Argmax(finals, final_scores);
  trace.degenerate = finals[best].steps.empty();
  return {std::move(finals[best]), std::move(trace)};
}

}  // namespace

const char *DecodeModeName(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kGreedy: return "greedy";
    case DecodeMode::kRerank: return "rerank";
    case DecodeMode::kStepwise: return "stepwise";
    case DecodeMode::kStepwisePP: return "stepwisepp";
  }
  return "greedy";
}

std::optional<DecodeMode> ParseDecodeMode(std::string_view name) {
  if (name == "greedy") return DecodeMode::kGreedy;
  if (name == "rerank") return DecodeMode::kRerank;
  if (name == "stepwise") return DecodeMode::kStepwise;
  if (name == "stepwisepp" || name == "stepwise++") return DecodeMode::kStepwisePP;
  return std::nullopt;
}

void DecodeConfig::validate() const {
  auto fail = [](const std::string &m) { throw std::invalid_argument("decode config: " + m); };
  if (beam_size < 1) fail("K must be at least 1");
  if (expansions < 1) fail("N must be at least 1");
  if (temperature_schedule.empty()) fail("temperature schedule is empty");
  int total = 0;
  for (const TemperatureGroup &g : temperature_schedule) {
    if (g.count < 1) fail("temperature schedule counts must be positive");
    if (!(g.temperature >= 0.0)) fail("temperatures must be non-negative");
    total += g.count;
  }
  if (total != expansions) fail("temperature schedule counts must sum to N");
  if (alpha_clusters.empty()) fail("alpha clusters are empty");
  auto check_alpha = [&](double a) {
    if (!(a >= 0.0 && a <= 1.0)) fail("alpha values must lie in [0, 1]");
  };
  for (double a : alpha_clusters) check_alpha(a);
  check_alpha(final_alpha);
  check_alpha(stepwise_alpha);
  if (rerank_n < 1) fail("rerank_n must be at least 1");
  if (!(rerank_temperature >= 0.0)) fail("rerank temperature must be non-negative");
  if (max_steps < 1) fail("max_steps must be at least 1");
  if (step_separator.empty()) fail("step separator is empty");
  try {
    budgets.validate();
  } catch (const PromptError &e) {
    fail(e.what());
  }
}

double DecodeConfig::modal_temperature() const {
  const TemperatureGroup *best = &temperature_schedule.front();
  for (const TemperatureGroup &g : temperature_schedule) {
    if (g.count > best->count) best = &g;
  }
  return best->temperature;
}

std::vector<int> DecodeConfig::cluster_quotas() const {
  const int clusters = static_cast<int>(alpha_clusters.size());
  std::vector<int> quotas(alpha_clusters.size(), beam_size / clusters);
  std::vector<size_t> by_alpha(alpha_clusters.size());
  std::iota(by_alpha.begin(), by_alpha.end(), 0);
  std::stable_sort(by_alpha.begin(), by_alpha.end(), [&](size_t a, size_t b) {
    return alpha_clusters[a] > alpha_clusters[b];
  });
  for (int r = 0; r < beam_size % clusters; ++r) ++quotas[by_alpha[static_cast<size_t>(r)]];
  return quotas;
}

json DecodeConfig::to_json() const {
  json schedule = json::array();
  for (const TemperatureGroup &g : temperature_schedule) {
    schedule.push_back({g.count, g.temperature});
  }
  return {
      {"mode", DecodeModeName(mode)},
      {"K", beam_size},
      {"N", expansions},
      {"temperature_schedule", schedule},
      {"alpha_clusters", alpha_clusters},
      {"final_alpha", final_alpha},
      {"stepwise_alpha", stepwise_alpha},
      {"rerank_n", rerank_n},
      {"rerank_temperature", rerank_temperature},
      {"max_steps", max_steps},
      {"step_separator", step_separator},
      {"budgets",
       {{"max_prompt_tokens", budgets.max_prompt_tokens},
        {"max_full_proof_tokens", budgets.max_full_proof_tokens},
        {"max_history_tokens", budgets.max_history_tokens},
        {"max_step_tokens", budgets.max_step_tokens}}},
      {"parallel", parallel},
  };
}

DecodeConfig DecodeConfig::FromJson(const json &j) {
  DecodeConfig c;
  if (!j.is_object()) throw std::invalid_argument("decode config must be an object");
  if (j.contains("mode")) {
    auto mode = ParseDecodeMode(j["mode"].get<std::string>());
    if (!mode) throw std::invalid_argument("unknown decode mode");
    c.mode = *mode;
  }
  c.beam_size = j.value("K", c.beam_size);
  c.expansions = j.value("N", c.expansions);
  if (j.contains("temperature_schedule")) {
    c.temperature_schedule.clear();
    for (const json &g : j["temperature_schedule"]) {
      c.temperature_schedule.push_back({g.at(0).get<int>(), g.at(1).get<double>()});
    }
    if (!j.contains("N")) {
      c.expansions = 0;
      for (const auto &g : c.temperature_schedule) c.expansions += g.count;
    }
  }
  if (j.contains("alpha_clusters")) {
    c.alpha_clusters = j["alpha_clusters"].get<std::vector<double>>();
  }
  c.final_alpha = j.value("final_alpha", c.final_alpha);
  c.stepwise_alpha = j.value("stepwise_alpha", c.stepwise_alpha);
  c.rerank_n = j.value("rerank_n", c.rerank_n);
  c.rerank_temperature = j.value("rerank_temperature", c.rerank_temperature);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.step_separator = j.value("step_separator", c.step_separator);
  c.parallel = j.value("parallel", c.parallel);
  if (j.contains("budgets")) {
    const json &b = j["budgets"];
    c.budgets.max_prompt_tokens = b.value("max_prompt_tokens", c.budgets.max_prompt_tokens);
    c.budgets.max_full_proof_tokens =
        b.value("max_full_proof_tokens", c.budgets.max_full_proof_tokens);
    c.budgets.max_history_tokens = b.value("max_history_tokens", c.budgets.max_history_tokens);
    c.budgets.max_step_tokens = b.value("max_step_tokens", c.budgets.max_step_tokens);
  }
  c.validate();
  return c;
}

Candidate Candidate::Make(std::vector<std::string> steps, double cum_logprob,
                          bool terminated) {
  Candidate c;
  c.steps = std::move(steps);
  c.cum_logprob = cum_logprob;
  c.terminated = terminated;
  c.recompute_coverage();
  return c;
}

void Candidate::recompute_coverage() {
  covered_titles.clear();
  for (const std::string &step : steps) {
    for (const ReferenceMention &m : parse_mentions(step)) covered_titles.insert(m.key());
  }
}

std::string Candidate::text(std::string_view separator) const {
  return serialize_steps(steps, separator);
}

int v_constraint(const Candidate &candidate,
                 const std::set<std::string> &constraint_titles) {
  int count = 0;
  for (const std::string &title : constraint_titles) {
    if (candidate.covered_titles.contains(normalize_title(title))) ++count;
  }
  return count;
}

std::vector<double> score_candidates(std::span<const Candidate> candidates,
                                     const std::set<std::string> &constraint_titles,
                                     double alpha) {
  std::set<std::string> normalized;
  for (const std::string &t : constraint_titles) normalized.insert(normalize_title(t));
  std::vector<double> coverage(candidates.size());
  double max_coverage = kNormFloor, max_logprob = kNormFloor;
  for (size_t i = 0; i < candidates.size(); ++i) {
    coverage[i] = v_constraint(candidates[i], normalized);
    max_coverage = std::max(max_coverage, std::abs(coverage[i]));
    max_logprob = std::max(max_logprob, std::abs(candidates[i].cum_logprob));
  }
  std::vector<double> scores(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    scores[i] = alpha * (coverage[i] / max_coverage) +
                (1.0 - alpha) * (candidates[i].cum_logprob / max_logprob);
  }
  return scores;
}

std::vector<size_t> rank_candidates(std::span<const Candidate> candidates,
                                    std::span<const double> scores) {
  std::vector<std::string> texts;
  texts.reserve(candidates.size());
  for (const Candidate &c : candidates) texts.push_back(c.text());
  std::vector<size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (candidates[a].cum_logprob != candidates[b].cum_logprob) {
      return candidates[a].cum_logprob > candidates[b].cum_logprob;
    }
    if (texts[a] != texts[b]) return texts[a] < texts[b];
    if (candidates[a].terminated != candidates[b].terminated) {
      return candidates[a].terminated;
    }
    return a < b;
  });
  return order;
}

json SearchTrace::to_json() const {
  json iters = json::array();
  for (const TraceIteration &it : iterations) {
    json cands = json::array();
    for (const TraceCandidate &c : it.candidates) {
      cands.push_back({{"text", c.text},
                       {"cum_logprob", c.cum_logprob},
                       {"coverage", c.coverage},
                       {"terminated", c.terminated},
                       {"scores", c.scores},
                       {"selected", c.selected}});
    }
    iters.push_back({{"index", it.index},
                     {"expanded_prefixes", it.expanded_prefixes},
                     {"expansions", it.expansions},
                     {"degenerate", it.degenerate},
                     {"candidates", cands}});
  }
  json j = summary();
  j["iterations"] = iters;
  return j;
}

json SearchTrace::summary() const {
  return {{"mode", DecodeModeName(mode)},
          {"iterations", iterations.size()},
          {"expansions", expansions},
          {"generated_tokens", generated_tokens},
          {"degenerate", degenerate},
          {"forced", forced},
          {"exhausted", exhausted},
          {"fewer_than_k_terminated", fewer_than_k_terminated}};
}

DecodeResult decode_greedy(const DecodeTask &task, LanguageModel &lm,
                           const DecodeConfig &config) {
  return FullProofSearch(task, lm, config, /*greedy=*/true);
}

DecodeResult decode_rerank(const DecodeTask &task, LanguageModel &lm,
                           const DecodeConfig &config) {
  return FullProofSearch(task, lm, config, /*greedy=*/false);
}

DecodeResult decode_stepwise(const DecodeTask &task, LanguageModel &lm,
                             const DecodeConfig &config, double alpha) {
  config.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("stepwise alpha must lie in [0, 1]");
  }
  std::vector<TemperatureGroup> schedule{{config.expansions, config.modal_temperature()}};
  return SegmentSearch(task, lm, config, DecodeMode::kStepwise, schedule, {alpha},
                       {config.beam_size}, alpha);
}

DecodeResult decode_stepwisepp(const DecodeTask &task, LanguageModel &lm,
                               const DecodeConfig &config) {
  config.validate();
  return SegmentSearch(task, lm, config, DecodeMode::kStepwisePP,
                       config.temperature_schedule, config.alpha_clusters,
                       config.cluster_quotas(), config.final_alpha);
}

DecodeResult decode(const DecodeTask &task, LanguageModel &lm,
                    const DecodeConfig &config) {
  switch (config.mode) {
    case DecodeMode::kGreedy: return decode_greedy(task, lm, config);
    case DecodeMode::kRerank: return decode_rerank(task, lm, config);
    case DecodeMode::kStepwise:
      return decode_stepwise(task, lm, config, config.stepwise_alpha);
    case DecodeMode::kStepwisePP: return decode_stepwisepp(task, lm, config);
  }
  throw std::invalid_argument("unknown decode mode");
}

}  // namespace groundproof
