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

#include "groundproof/annotations.h"

#include <fstream>

namespace groundproof {

using json = nlohmann::json;

namespace {

struct ErrorInfo {
  StepError error;
  const char *name;
  ErrorBucket bucket;
};

constexpr ErrorInfo kErrors[kStepErrorCount] = {
    {StepError::kInvalidDeployment, "invalid_deployment", ErrorBucket::kReference},
    {StepError::kInvalidJustification, "invalid_justification", ErrorBucket::kReference},
    {StepError::kHallucinatedRef, "hallucinated_ref", ErrorBucket::kReference},
    {StepError::kSelfLoop, "self_loop", ErrorBucket::kReference},
    {StepError::kInvalidEquation, "invalid_equation", ErrorBucket::kEquation},
    {StepError::kInvalidDerivation, "invalid_derivation", ErrorBucket::kEquation},
    {StepError::kSkipsSteps, "skips_steps", ErrorBucket::kOtherReasoning},
    {StepError::kRepetition, "repetition", ErrorBucket::kOtherReasoning},
    {StepError::kInvalidOther, "invalid_other", ErrorBucket::kOtherReasoning},
    {StepError::kIncomplete, "incomplete", ErrorBucket::kLanguage},
    {StepError::kMisformattedMath, "misformatted_math", ErrorBucket::kLanguage},
    {StepError::kUnknownSymbol, "unknown_symbol", ErrorBucket::kLanguage},
    {StepError::kUndefined, "undefined", ErrorBucket::kSymbolic},
    {StepError::kOverloaded, "overloaded", ErrorBucket::kSymbolic},
    {StepError::kMistyped, "mistyped", ErrorBucket::kSymbolic},
    {StepError::kUnconventional, "unconventional", ErrorBucket::kSymbolic},
};

const char *CorrectnessName(StepCorrectness c) {
  switch (c) {
    case StepCorrectness::kYes: return "yes";
    case StepCorrectness::kNo: return "no";
    case StepCorrectness::kCannotDetermine: return "cannot_determine";
    case StepCorrectness::kMeaningless: return "meaningless";
  }
  return "cannot_determine";
}

StepCorrectness ParseCorrectness(const json &v) {
  if (v.is_boolean()) return v.get<bool>() ? StepCorrectness::kYes : StepCorrectness::kNo;
  if (v.is_null()) return StepCorrectness::kCannotDetermine;
  if (!v.is_string()) throw AnnotationError("step_correct must be a string, bool or null");
  std::string s = v.get<std::string>();
  if (s == "yes") return StepCorrectness::kYes;
  if (s == "no") return StepCorrectness::kNo;
  if (s == "cannot_determine" || s == "unknown") return StepCorrectness::kCannotDetermine;
  if (s == "meaningless") return StepCorrectness::kMeaningless;
  throw AnnotationError("unknown step_correct value '" + s + "'");
}

std::optional<int> ParseRating(const json &j, const char *field) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  if (!j[field].is_number_integer()) {
    throw AnnotationError(std::string("field '") + field + "' must be an integer");
  }
  int v = j[field].get<int>();
  if (v < 0 || v > 5) {
    throw AnnotationError(std::string("field '") + field + "' must lie in 0..5");
  }
  return v;
}

}  // namespace

const char *StepErrorName(StepError error) {
  return kErrors[static_cast<size_t>(error)].name;
}

std::optional<StepError> ParseStepError(std::string_view name) {
  for (const ErrorInfo &info : kErrors) {
    if (name == info.name) return info.error;
  }
  return std::nullopt;
}

const char *ErrorBucketName(ErrorBucket bucket) {
  switch (bucket) {
    case ErrorBucket::kReference: return "reference";
    case ErrorBucket::kEquation: return "equation";
    case ErrorBucket::kOtherReasoning: return "other_reasoning";
    case ErrorBucket::kLanguage: return "language";
    case ErrorBucket::kSymbolic: return "symbolic";
  }
  return "other_reasoning";
}

ErrorBucket BucketOf(StepError error) { return kErrors[static_cast<size_t>(error)].bucket; }

const std::array<StepError, kStepErrorCount> &AllStepErrors() {
  static const std::array<StepError, kStepErrorCount> all = [] {
    std::array<StepError, kStepErrorCount> a{};
    for (size_t i = 0; i < kStepErrorCount; ++i) a[i] = kErrors[i].error;
    return a;
  }();
  return all;
}

const std::array<ErrorBucket, kErrorBucketCount> &AllErrorBuckets() {
  static const std::array<ErrorBucket, kErrorBucketCount> all = {
      ErrorBucket::kReference, ErrorBucket::kEquation, ErrorBucket::kOtherReasoning,
      ErrorBucket::kLanguage, ErrorBucket::kSymbolic};
  return all;
}

AnnotationRecord AnnotationRecord::FromJson(const json &j) {
  if (!j.is_object()) throw AnnotationError("annotation record is not an object");
  AnnotationRecord r;
  if (!j.contains("theorem_id") || !j["theorem_id"].is_number_integer()) {
    throw AnnotationError("annotation record needs an integer theorem_id");
  }
  r.theorem_id = j["theorem_id"].get<int>();
  r.step_index = j.value("step_index", 0);
  if (j.contains("fine_grained_errors")) {
    for (const json &e : j["fine_grained_errors"]) {
      std::string name = e.get<std::string>();
      auto error = ParseStepError(name);
      if (!error) throw AnnotationError("unknown fine-grained error '" + name + "'");
      r.errors.insert(*error);
    }
  }
  if (j.contains("step_correct")) r.step_correct = ParseCorrectness(j["step_correct"]);
  r.step_useful = j.value("step_useful", false);
  r.overall_correct = ParseRating(j, "overall_correct");
  r.overall_useful = ParseRating(j, "overall_useful");
  return r;
}

json AnnotationRecord::to_json() const {
  json errs = json::array();
  for (StepError e : errors) errs.push_back(StepErrorName(e));
  json j = {{"theorem_id", theorem_id},
            {"step_index", step_index},
            {"fine_grained_errors", errs},
            {"step_correct", CorrectnessName(step_correct)},
            {"step_useful", step_useful}};
  if (overall_correct) j["overall_correct"] = *overall_correct;
  if (overall_useful) j["overall_useful"] = *overall_useful;
  return j;
}

std::vector<AnnotationRecord> load_annotations(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw AnnotationError("cannot open annotations file '" + path + "'");
  std::vector<AnnotationRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(AnnotationRecord::FromJson(json::parse(line)));
    } catch (const std::exception &e) {
      throw AnnotationError("annotations line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return records;
}

AggregateReport aggregate_annotations(const std::vector<AnnotationRecord> &records,
                                      const AnnotationThresholds &thresholds) {
  AggregateReport report;
  for (StepError e : AllStepErrors()) report.error_rates[e] = 0.0;
  for (ErrorBucket b : AllErrorBuckets()) report.bucket_rates[b] = 0.0;
  report.steps = records.size();
  report.empty = records.empty();
  if (records.empty()) return report;

  const double steps = static_cast<double>(records.size());
  std::map<StepError, size_t> error_counts;
  std::map<ErrorBucket, size_t> bucket_counts;
  size_t correct = 0, useful = 0;
  for (const AnnotationRecord &r : records) {
    std::set<ErrorBucket> buckets;
    for (StepError e : r.errors) {
      ++error_counts[e];
      buckets.insert(BucketOf(e));
    }
    for (ErrorBucket b : buckets) ++bucket_counts[b];
    if (r.step_correct == StepCorrectness::kYes) ++correct;
    if (r.step_useful) ++useful;
  }
  for (auto &[e, rate] : report.error_rates) {
    rate = static_cast<double>(error_counts[e]) / steps;
  }
  for (auto &[b, rate] : report.bucket_rates) {
    rate = static_cast<double>(bucket_counts[b]) / steps;
  }
  report.step_correct_rate = static_cast<double>(correct) / steps;
  report.step_useful_rate = static_cast<double>(useful) / steps;

  std::map<int, int> overall_correct, overall_useful;
  for (const AnnotationRecord &r : records) {
    if (r.overall_correct) overall_correct.emplace(r.theorem_id, *r.overall_correct);
    if (r.overall_useful) overall_useful.emplace(r.theorem_id, *r.overall_useful);
  }
  auto summarize = [](const std::map<int, int> &ratings, int threshold, double &rate,
                      double &mean) {
    if (ratings.empty()) return;
    size_t above = 0;
    double total = 0.0;
    for (const auto &[id, v] : ratings) {
      if (v >= threshold) ++above;
      total += v;
    }
    rate = static_cast<double>(above) / static_cast<double>(ratings.size());
    mean = total / static_cast<double>(ratings.size());
  };
  summarize(overall_correct, thresholds.correct, report.overall_correct_rate,
            report.overall_correct_mean);
  summarize(overall_useful, thresholds.useful, report.overall_useful_rate,
            report.overall_useful_mean);
  report.proofs = std::max(overall_correct.size(), overall_useful.size());
  return report;
}

std::vector<std::pair<std::string, double>> AggregateReport::human_metrics() const {
  std::vector<std::pair<std::string, double>> out = {
      {"overall_correct", overall_correct_mean},
      {"overall_useful", overall_useful_mean},
      {"step_correct", step_correct_rate},
      {"step_useful", step_useful_rate},
  };
  for (ErrorBucket b : AllErrorBuckets()) {
    auto it = bucket_rates.find(b);
    out.emplace_back(std::string("neg_") + ErrorBucketName(b) + "_errors",
                     it == bucket_rates.end() ? -0.0 : -it->second);
  }
  return out;
}

json AggregateReport::to_json() const {
  json errors = json::object();
  for (const auto &[e, rate] : error_rates) errors[StepErrorName(e)] = rate;
  json buckets = json::object();
  for (const auto &[b, rate] : bucket_rates) buckets[ErrorBucketName(b)] = rate;
  return {{"steps", steps},
          {"proofs", proofs},
          {"empty", empty},
          {"error_rates", errors},
          {"bucket_rates", buckets},
          {"step_correct_rate", step_correct_rate},
          {"step_useful_rate", step_useful_rate},
          {"overall_correct_rate", overall_correct_rate},
          {"overall_useful_rate", overall_useful_rate},
          {"overall_correct_mean", overall_correct_mean},
          {"overall_useful_mean", overall_useful_mean}};
}

}  // namespace groundproof
