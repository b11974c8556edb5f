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

#include "groundproof/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <sstream>

namespace groundproof {

using json = nlohmann::json;

namespace {

std::string_view Trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool IsStepwise(DecodeMode mode) {
  return mode == DecodeMode::kStepwise || mode == DecodeMode::kStepwisePP;
}

std::string ReadFile(const std::string &path, const char *what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarnessError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char *TaskName(Task task) {
  return task == Task::kFullProof ? "full_proof" : "next_step";
}

std::optional<Task> ParseTask(std::string_view name) {
  if (name == "full_proof") return Task::kFullProof;
  if (name == "next_step") return Task::kNextStep;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  try {
    decode.validate();
  } catch (const std::invalid_argument &e) {
    throw HarnessError(std::string("decode: ") + e.what());
  }
  if (setting == KnowledgeSetting::kRetrieved && !retrievals_path) {
    throw HarnessError("setting 'retrieved' requires retrievals_path");
  }
  if (IsStepwise(decode.mode)) {
    if (task == Task::kNextStep) {
      throw HarnessError(std::string("decode mode '") + DecodeModeName(decode.mode) +
                         "' is not available for the next_step task");
    }
    if (setting != KnowledgeSetting::kProvided) {
      throw HarnessError(std::string("decode mode '") + DecodeModeName(decode.mode) +
                         "' requires setting 'provided', got '" +
                         KnowledgeSettingName(setting) + "'");
    }
  }
  if (suggestions_k < 1) throw HarnessError("suggestions_k must be at least 1");
  if (suggestion_temperature < 0.0) {
    throw HarnessError("suggestion_temperature must be non-negative");
  }
  if (max_steps_per_proof && *max_steps_per_proof < 1) {
    throw HarnessError("max_steps_per_proof must be at least 1");
  }
  if (workers < 1) throw HarnessError("workers must be at least 1");
  if (thresholds.correct < 0 || thresholds.correct > 5 || thresholds.useful < 0 ||
      thresholds.useful > 5) {
    throw HarnessError("thresholds must lie in 0..5");
  }
}

json ExperimentConfig::to_json() const {
  json j = {{"setting", KnowledgeSettingName(setting)},
            {"task", TaskName(task)},
            {"decode", decode.to_json()},
            {"split", SplitName(split)},
            {"suggestions_k", suggestions_k},
            {"suggestion_temperature", suggestion_temperature},
            {"seed", seed},
            {"workers", workers},
            {"thresholds", {{"correct", thresholds.correct}, {"useful", thresholds.useful}}}};
  j["theorem_filter"] = theorem_filter ? json(*theorem_filter) : json(nullptr);
  j["retrievals_path"] = retrievals_path ? json(*retrievals_path) : json(nullptr);
  j["max_steps_per_proof"] = max_steps_per_proof ? json(*max_steps_per_proof) : json(nullptr);
  return j;
}

ExperimentConfig ExperimentConfig::FromJson(const json &j) {
  if (!j.is_object()) throw HarnessError("experiment config must be a JSON object");
  ExperimentConfig c;
  try {
    if (j.contains("setting")) {
      std::string s = j["setting"].get<std::string>();
      auto setting = ParseKnowledgeSetting(s);
      if (!setting) throw HarnessError("unknown setting '" + s + "'");
      c.setting = *setting;
    }
    if (j.contains("task")) {
      std::string s = j["task"].get<std::string>();
      auto task = ParseTask(s);
      if (!task) throw HarnessError("unknown task '" + s + "'");
      c.task = *task;
    }
    if (j.contains("decode")) c.decode = DecodeConfig::FromJson(j["decode"]);
    if (j.contains("split")) {
      std::string s = j["split"].get<std::string>();
      auto split = ParseSplit(s);
      if (!split) throw HarnessError("unknown split '" + s + "'");
      c.split = *split;
    }
    if (j.contains("theorem_filter") && !j["theorem_filter"].is_null()) {
      c.theorem_filter = j["theorem_filter"].get<std::vector<int>>();
    }
    if (j.contains("retrievals_path") && !j["retrievals_path"].is_null()) {
      c.retrievals_path = j["retrievals_path"].get<std::string>();
    }
    c.suggestions_k = j.value("suggestions_k", c.suggestions_k);
    c.suggestion_temperature = j.value("suggestion_temperature", c.suggestion_temperature);
    c.seed = j.value("seed", c.seed);
    if (j.contains("max_steps_per_proof") && !j["max_steps_per_proof"].is_null()) {
      c.max_steps_per_proof = j["max_steps_per_proof"].get<int>();
    }
    c.workers = j.value("workers", c.workers);
    if (j.contains("thresholds")) {
      c.thresholds.correct = j["thresholds"].value("correct", c.thresholds.correct);
      c.thresholds.useful = j["thresholds"].value("useful", c.thresholds.useful);
    }
  } catch (const json::exception &e) {
    throw HarnessError(std::string("experiment config: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw HarnessError(std::string("experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string &path) {
  std::string data = ReadFile(path, "config");
  json j;
  try {
    j = json::parse(data);
  } catch (const json::parse_error &e) {
    throw HarnessError("config '" + path + "': " + e.what());
  }
  return FromJson(j);
}

RetrievalFile parse_retrievals(const json &j, const Corpus *corpus) {
  if (!j.is_object()) throw HarnessError("retrievals must map theorem ids to title lists");
  RetrievalFile out;
  for (const auto &[key, value] : j.items()) {
    int id = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
    if (ec != std::errc() || ptr != key.data() + key.size()) {
      throw HarnessError("retrievals: key '" + key + "' is not a theorem id");
    }
    if (!value.is_array()) throw HarnessError("retrievals: entry " + key + " is not a list");
    std::vector<std::string> titles;
    std::set<std::string> seen;
    for (const json &t : value) {
      if (!t.is_string()) {
        throw HarnessError("retrievals: entry " + key + " holds a non-string title");
      }
      std::string title = normalize_title(t.get<std::string>());
      if (!seen.insert(title).second) {
        out.warnings.push_back("theorem " + key + ": duplicate title '" + title +
                               "' dropped");
        continue;
      }
      titles.push_back(std::move(title));
    }
    if (titles.size() > kRetrievedTitles) {
      out.warnings.push_back("theorem " + key + ": " + std::to_string(titles.size()) +
                             " titles, keeping the first " +
                             std::to_string(kRetrievedTitles));
      titles.resize(kRetrievedTitles);
    } else if (titles.size() < kRetrievedTitles) {
      out.warnings.push_back("theorem " + key + ": only " + std::to_string(titles.size()) +
                             " titles");
    }
    if (corpus) {
      const Reference *page = corpus->find_by_id(id);
      if (!page || page->kind != ReferenceKind::kTheorem) {
        out.warnings.push_back("theorem " + key + ": not a theorem in the corpus");
      }
    }
    out.retrievals[id] = std::move(titles);
  }
  return out;
}

RetrievalFile load_retrievals(const std::string &path, const Corpus *corpus) {
  std::string data = ReadFile(path, "retrievals file");
  json j;
  try {
    j = json::parse(data);
  } catch (const json::parse_error &e) {
    throw HarnessError("retrievals '" + path + "': " + e.what());
  }
  return parse_retrievals(j, corpus);
}

std::vector<Suggestion> suggest_next_steps(const Reference &theorem,
                                           const std::vector<std::string> &ref_titles,
                                           const std::vector<std::string> &history,
                                           const SuggestOptions &options,
                                           LanguageModel &lm) {
  auto counter = [&lm](std::string_view s) { return lm.count_tokens(s); };
  std::optional<std::vector<std::string>> proof_so_far;
  if (!history.empty()) proof_so_far = history;
  SampleRequest request;
  request.prompt = render_inference_prompt(theorem, ref_titles, proof_so_far,
                                           options.budgets, counter,
                                           options.step_separator);
  request.temperature = options.temperature;
  request.n = options.k;
  request.max_tokens = options.budgets.max_step_tokens;
  request.stop_sequences = {options.step_separator};
  request.stream = options.stream;

  std::set<std::string> constraints;
  for (const std::string &t : ref_titles) constraints.insert(normalize_title(t));

  std::vector<Suggestion> out;
  std::map<std::string, size_t> seen;
  for (int round = 0; round <= std::max(0, options.distinct_rounds); ++round) {
    request.stream.sample = options.stream.sample +
                            static_cast<uint64_t>(round) * static_cast<uint64_t>(options.k);
    for (const SampleResult &r : lm.sample(request)) {
      std::string text = r.text;
      bool done = r.truncated_by == SampleResult::Finish::kEnd;
      if (size_t close = text.find(kProofClose); close != std::string::npos) {
        text.resize(close);
        done = true;
      }
      std::string_view body = Trim(text);
      if (body.empty() && !done) continue;
      Suggestion s;
      s.text = std::string(body);
      s.logprob = r.logprob;
      s.token_count = r.token_count;
      s.terminated = done;
      for (const std::string &t : mentioned_titles(s.text)) {
        if (constraints.empty() || constraints.count(t)) s.covered_titles.insert(t);
      }
      if (options.distinct_rounds > 0) {
        auto it = seen.find(s.text);
        if (it != seen.end()) {
          if (s.logprob > out[it->second].logprob) out[it->second] = std::move(s);
          continue;
        }
        if (static_cast<int>(out.size()) >= options.k) continue;
        seen.emplace(s.text, out.size());
      }
      out.push_back(std::move(s));
    }
    if (options.distinct_rounds <= 0 || static_cast<int>(out.size()) >= options.k) break;
  }
  return out;
}

json TheoremEntry::to_json() const {
  json j = {{"theorem_id", theorem_id},
            {"generated", generated},
            {"generated_steps", generated_steps},
            {"metrics", metrics.to_json()}};
  if (step_index >= 0) {
    j["step_index"] = step_index;
    json sugg = json::array();
    for (const ScoredSuggestion &s : suggestions) {
      sugg.push_back({{"text", s.text},
                      {"logprob", s.logprob},
                      {"metrics", s.metrics.to_json()},
                      {"selection_sum", s.metrics.selection_sum()}});
    }
    j["suggestions"] = sugg;
    j["selected"] = selected;
  } else {
    j["trace"] = trace_summary;
  }
  return j;
}

json RunReport::to_json() const {
  json entries_json = json::array();
  for (const TheoremEntry &e : entries) entries_json.push_back(e.to_json());
  json failures_json = json::array();
  for (const TheoremFailure &f : failures) {
    failures_json.push_back(
        {{"theorem_id", f.theorem_id}, {"error", f.error}, {"retryable", f.retryable}});
  }
  return {{"task", TaskName(task)},
          {"setting", KnowledgeSettingName(setting)},
          {"seed", seed},
          {"config", config},
          {"theorems", theorems},
          {"scored_theorems", theorems - failures.size()},
          {"entries_scored", entries.size()},
          {"entries", entries_json},
          {"failures", failures_json},
          {"means", means.to_json()},
          {"cost",
           {{"calls", cost.calls},
            {"samples", cost.samples},
            {"generated_tokens", cost.generated_tokens}}}};
}

std::string RunReport::means_csv() const {
  std::string out;
  for (const char *name : MetricReport::kFieldNames) {
    out += name;
    out += ',';
  }
  out += "n\n";
  for (double v : means.values()) {
    out += format_double(v);
    out += ',';
  }
  out += std::to_string(entries.size());
  out += '\n';
  return out;
}

std::string RunReport::entries_csv() const {
  std::string out = "theorem_id,step_index";
  for (const char *name : MetricReport::kFieldNames) {
    out += ',';
    out += name;
  }
  out += ",generated\n";
  for (const TheoremEntry &e : entries) {
    out += std::to_string(e.theorem_id) + ',' + std::to_string(e.step_index);
    for (double v : e.metrics.values()) out += ',' + format_double(v);
    out += ',' + CsvField(e.generated) + '\n';
  }
  return out;
}

std::vector<int> select_theorems(const ExperimentConfig &config, const Corpus &corpus) {
  std::vector<int> ids;
  std::set<int> filter;
  if (config.theorem_filter) filter.insert(config.theorem_filter->begin(),
                                           config.theorem_filter->end());
  for (int id : corpus.split(config.split)) {
    if (config.theorem_filter && !filter.count(id)) continue;
    if (!corpus.find_example(id)) continue;
    ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> knowledge_titles(KnowledgeSetting setting, int theorem_id,
                                          const Corpus &corpus,
                                          const Retrievals *retrievals) {
  switch (setting) {
    case KnowledgeSetting::kNone:
      return {};
    case KnowledgeSetting::kProvided: {
      const Example *ex = corpus.find_example(theorem_id);
      if (!ex) throw HarnessError("no gold proof for theorem " + std::to_string(theorem_id));
      return ex->proof.ref_titles;
    }
    case KnowledgeSetting::kRetrieved: {
      if (!retrievals) throw HarnessError("setting 'retrieved' without retrievals");
      auto it = retrievals->find(theorem_id);
      if (it == retrievals->end()) {
        throw HarnessError("no retrievals for theorem " + std::to_string(theorem_id));
      }
      return it->second;
    }
  }
  return {};
}

namespace {

struct Outcome {
  std::vector<TheoremEntry> entries;
  std::optional<TheoremFailure> failure;
};

// Runs `work` for every theorem, `workers` at a time, and merges the outcomes
// in theorem order.
template <typename Work>
RunReport RunAll(const ExperimentConfig &config, const Corpus &corpus, LanguageModel &lm,
                 Work work) {
  config.validate();
  std::vector<int> ids = select_theorems(config, corpus);
  std::vector<Outcome> outcomes(ids.size());

  auto process = [&](size_t i) {
    Outcome &out = outcomes[i];
    try {
      out.entries = work(ids[i]);
    } catch (const DecodeError &e) {
      out.failure = TheoremFailure{ids[i], e.what(), e.retryable()};
    } catch (const BackendError &e) {
      out.failure = TheoremFailure{ids[i], e.what(), e.retryable()};
    } catch (const PromptError &e) {
      out.failure = TheoremFailure{ids[i], e.what(), false};
    } catch (const HarnessError &e) {
      out.failure = TheoremFailure{ids[i], e.what(), false};
    }
  };

  if (config.workers > 1 && ids.size() > 1) {
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> pool;
    size_t n = std::min(ids.size(), static_cast<size_t>(config.workers));
    for (size_t w = 0; w < n; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (size_t i = next++; i < ids.size(); i = next++) process(i);
      }));
    }
    for (auto &f : pool) f.get();
  } else {
    for (size_t i = 0; i < ids.size(); ++i) process(i);
  }

  RunReport report;
  report.task = config.task;
  report.setting = config.setting;
  report.seed = config.seed;
  report.config = config.to_json();
  report.theorems = ids.size();
  std::vector<MetricReport> metrics;
  for (Outcome &o : outcomes) {
    if (o.failure) {
      report.failures.push_back(std::move(*o.failure));
      continue;
    }
    for (TheoremEntry &e : o.entries) {
      metrics.push_back(e.metrics);
      report.entries.push_back(std::move(e));
    }
  }
  report.means = mean_report(metrics);
  report.cost = lm.cost().snapshot();
  if (report.failures.size() * 2 > report.theorems) {
    std::string msg = std::to_string(report.failures.size()) + " of " +
                      std::to_string(report.theorems) + " theorems failed";
    if (!report.failures.empty()) msg += "; first: " + report.failures.front().error;
    throw HarnessError(msg);
  }
  return report;
}

}  // namespace

RunReport run_full_proof(const ExperimentConfig &config, const Corpus &corpus,
                         LanguageModel &lm, const Retrievals *retrievals) {
  if (config.task != Task::kFullProof) throw HarnessError("config task is not full_proof");
  return RunAll(config, corpus, lm, [&](int id) {
    const Reference *theorem = corpus.find_by_id(id);
    const Example *gold = corpus.find_example(id);
    DecodeTask task{theorem, knowledge_titles(config.setting, id, corpus, retrievals)};
    DecodeResult result = decode(task, lm, config.decode);
    TheoremEntry entry;
    entry.theorem_id = id;
    entry.generated_steps = result.proof.steps;
    entry.generated = result.proof.text(config.decode.step_separator);
    entry.metrics = score_proof(entry.generated, gold->proof, corpus);
    entry.trace_summary = result.trace.summary();
    return std::vector<TheoremEntry>{std::move(entry)};
  });
}

RunReport run_next_step(const ExperimentConfig &config, const Corpus &corpus,
                        LanguageModel &lm, const Retrievals *retrievals) {
  if (config.task != Task::kNextStep) throw HarnessError("config task is not next_step");
  return RunAll(config, corpus, lm, [&](int id) {
    const Reference *theorem = corpus.find_by_id(id);
    const Example *gold = corpus.find_example(id);
    std::vector<std::string> titles =
        knowledge_titles(config.setting, id, corpus, retrievals);
    size_t steps = gold->proof.steps.size();
    if (config.max_steps_per_proof) {
      steps = std::min(steps, static_cast<size_t>(*config.max_steps_per_proof));
    }
    std::vector<TheoremEntry> entries;
    std::vector<std::string> history;
    for (size_t t = 0; t < steps; ++t) {
      const ProofStep &gold_step = gold->proof.steps[t];
      SuggestOptions options;
      options.k = config.suggestions_k;
      options.temperature = config.suggestion_temperature;
      options.budgets = config.decode.budgets;
      options.step_separator = config.decode.step_separator;
      options.stream = {static_cast<uint64_t>(t), 0, 0};
      std::vector<Suggestion> suggestions =
          suggest_next_steps(*theorem, titles, history, options, lm);

      TheoremEntry entry;
      entry.theorem_id = id;
      entry.step_index = static_cast<int>(t);
      std::vector<MetricReport> reports;
      for (const Suggestion &s : suggestions) {
        MetricReport m = score_step(s.text, gold_step, corpus);
        reports.push_back(m);
        entry.suggestions.push_back({s.text, s.logprob, m});
      }
      if (reports.empty()) {
        // Nothing usable came back; the step scores as an empty suggestion.
        entry.metrics = score_step("", gold_step, corpus);
      } else {
        size_t best = best_of_k(reports);
        entry.selected = static_cast<int>(best);
        entry.generated = suggestions[best].text;
        entry.generated_steps = {entry.generated};
        entry.metrics = reports[best];
      }
      entries.push_back(std::move(entry));
      history.push_back(gold_step.raw);
    }
    return entries;
  });
}

RunReport run_experiment(const ExperimentConfig &config, const Corpus &corpus,
                         LanguageModel &lm) {
  config.validate();
  std::optional<RetrievalFile> retrievals;
  if (config.retrievals_path) retrievals = load_retrievals(*config.retrievals_path, &corpus);
  const Retrievals *r = retrievals ? &retrievals->retrievals : nullptr;
  return config.task == Task::kFullProof ? run_full_proof(config, corpus, lm, r)
                                         : run_next_step(config, corpus, lm, r);
}

std::vector<Prediction> load_predictions(const std::string &path) {
  std::istringstream in(ReadFile(path, "predictions file"));
  std::vector<Prediction> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      out.push_back({j.at("theorem_id").get<int>(), j.at("proof").get<std::string>()});
    } catch (const json::exception &e) {
      throw HarnessError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

RunReport score_predictions(const std::vector<Prediction> &predictions,
                            const Corpus &corpus) {
  RunReport report;
  report.theorems = predictions.size();
  std::vector<MetricReport> metrics;
  for (const Prediction &p : predictions) {
    const Example *gold = corpus.find_example(p.theorem_id);
    if (!gold) {
      report.failures.push_back({p.theorem_id, "no gold proof", false});
      continue;
    }
    TheoremEntry entry;
    entry.theorem_id = p.theorem_id;
    ProofDocument doc = segment_proof(p.proof);
    for (const ProofStep &s : doc.steps) entry.generated_steps.push_back(s.raw);
    entry.generated = p.proof;
    entry.metrics = score_proof(p.proof, gold->proof, corpus);
    metrics.push_back(entry.metrics);
    report.entries.push_back(std::move(entry));
  }
  report.means = mean_report(metrics);
  return report;
}

json CorrelationMatrix::to_json() const {
  json rows = json::array();
  for (size_t i = 0; i < automatic.size(); ++i) {
    json row = json::object();
    for (size_t j = 0; j < human.size(); ++j) {
      row[human[j]] = cells[i][j] ? json(*cells[i][j]) : json("undefined");
    }
    rows.push_back({{"metric", automatic[i]}, {"r", row}});
  }
  return {{"labels", labels}, {"automatic", automatic}, {"human", human}, {"matrix", rows}};
}

std::string CorrelationMatrix::to_csv() const {
  std::string out = "metric";
  for (const std::string &h : human) out += ',' + h;
  out += '\n';
  for (size_t i = 0; i < automatic.size(); ++i) {
    out += automatic[i];
    for (size_t j = 0; j < human.size(); ++j) {
      out += ',';
      out += cells[i][j] ? format_double(*cells[i][j]) : "undefined";
    }
    out += '\n';
  }
  return out;
}

CorrelationMatrix correlate(
    const std::vector<std::pair<std::string, RunReport>> &runs,
    const std::vector<std::pair<std::string, AggregateReport>> &aggregates) {
  CorrelationMatrix m;
  for (const char *name : MetricReport::kFieldNames) {
    m.automatic.push_back(std::string(name) == "halluc" ? "neg_halluc" : name);
  }
  for (const auto &[name, value] : AggregateReport().human_metrics()) {
    m.human.push_back(name);
  }

  std::map<std::string, const AggregateReport *> by_label;
  for (const auto &[label, agg] : aggregates) by_label.emplace(label, &agg);
  std::vector<std::array<double, 7>> auto_values;
  std::vector<std::vector<double>> human_values;
  for (const auto &[label, run] : runs) {
    auto it = by_label.find(label);
    if (it == by_label.end()) continue;
    if (std::find(m.labels.begin(), m.labels.end(), label) != m.labels.end()) continue;
    m.labels.push_back(label);
    std::array<double, 7> v = run.means.values();
    v[6] = -v[6];
    auto_values.push_back(v);
    std::vector<double> h;
    for (const auto &[name, value] : it->second->human_metrics()) h.push_back(value);
    human_values.push_back(std::move(h));
  }

  m.cells.assign(m.automatic.size(),
                 std::vector<std::optional<double>>(m.human.size()));
  if (m.labels.size() < 2) return m;
  for (size_t i = 0; i < m.automatic.size(); ++i) {
    std::vector<double> xs;
    for (const auto &v : auto_values) xs.push_back(v[i]);
    for (size_t j = 0; j < m.human.size(); ++j) {
      std::vector<double> ys;
      for (const auto &h : human_values) ys.push_back(h[j]);
      try {
        m.cells[i][j] = pearson(xs, ys);
      } catch (const UndefinedCorrelation &) {
      }
    }
  }
  return m;
}

}  // namespace groundproof
