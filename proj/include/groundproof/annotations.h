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

#ifndef GROUNDPROOF_ANNOTATIONS_H_
#define GROUNDPROOF_ANNOTATIONS_H_

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace groundproof {

class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fine-grained step errors of the human evaluation schema.
enum class StepError {
  kInvalidDeployment,
  kInvalidJustification,
  kHallucinatedRef,
  kSelfLoop,
  kInvalidEquation,
  kInvalidDerivation,
  kSkipsSteps,
  kRepetition,
  kInvalidOther,
  kIncomplete,
  kMisformattedMath,
  kUnknownSymbol,
  kUndefined,
  kOverloaded,
  kMistyped,
  kUnconventional,
};

inline constexpr size_t kStepErrorCount = 16;

enum class ErrorBucket { kReference, kEquation, kOtherReasoning, kLanguage, kSymbolic };

inline constexpr size_t kErrorBucketCount = 5;

const char *StepErrorName(StepError error);
std::optional<StepError> ParseStepError(std::string_view name);
const char *ErrorBucketName(ErrorBucket bucket);
ErrorBucket BucketOf(StepError error);
const std::array<StepError, kStepErrorCount> &AllStepErrors();
const std::array<ErrorBucket, kErrorBucketCount> &AllErrorBuckets();

enum class StepCorrectness { kYes, kNo, kCannotDetermine, kMeaningless };

struct AnnotationRecord {
  int theorem_id = 0;
  int step_index = 0;
  std::set<StepError> errors;
  StepCorrectness step_correct = StepCorrectness::kCannotDetermine;
  bool step_useful = false;
  // Whole-proof ratings on a 0..5 scale.
  std::optional<int> overall_correct;
  std::optional<int> overall_useful;

  static AnnotationRecord FromJson(const nlohmann::json &j);
  nlohmann::json to_json() const;
};

// Reads JSON-lines annotation records.
std::vector<AnnotationRecord> load_annotations(const std::string &path);

struct AnnotationThresholds {
  int correct = 4;
  int useful = 3;
};

struct AggregateReport {
  size_t steps = 0;
  size_t proofs = 0;
  bool empty = true;
  // Fraction of steps exhibiting each error.
  std::map<StepError, double> error_rates;
  // Fraction of steps with any error in the bucket.
  std::map<ErrorBucket, double> bucket_rates;
  double step_correct_rate = 0.0;
  double step_useful_rate = 0.0;
  // Over proofs: fraction rated at or above the thresholds, and mean ratings.
  double overall_correct_rate = 0.0;
  double overall_useful_rate = 0.0;
  double overall_correct_mean = 0.0;
  double overall_useful_mean = 0.0;

  // Human metrics used for correlation, error rates negated so that larger
  // is better throughout.
  std::vector<std::pair<std::string, double>> human_metrics() const;

  nlohmann::json to_json() const;
};

// Overall ratings are taken once per theorem, from its first record that
// carries them.
AggregateReport aggregate_annotations(const std::vector<AnnotationRecord> &records,
                                      const AnnotationThresholds &thresholds = {});

}  // namespace groundproof

#endif  // GROUNDPROOF_ANNOTATIONS_H_
