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

#ifndef GROUNDPROOF_METRICS_H_
#define GROUNDPROOF_METRICS_H_

#include <array>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "groundproof/corpus.h"
#include "json.hpp"

namespace groundproof {

// Automatic scores for one generated proof (or proof step). All in [0, 1].
struct MetricReport {
  double gleu = 0.0;
  double token_f1 = 0.0;
  double kf1 = 0.0;
  double ref_p = 0.0;
  double ref_r = 0.0;
  double ref_f1 = 0.0;
  double halluc = 0.0;

  // Sum used for best-of-k selection; hallucination counts against.
  double selection_sum() const {
    return gleu + token_f1 + kf1 + ref_p + ref_r + ref_f1 - halluc;
  }

  static constexpr std::array<const char *, 7> kFieldNames = {
      "gleu", "token_f1", "kf1", "ref_p", "ref_r", "ref_f1", "halluc"};
  std::array<double, 7> values() const {
    return {gleu, token_f1, kf1, ref_p, ref_r, ref_f1, halluc};
  }
  static MetricReport FromValues(const std::array<double, 7> &v);

  nlohmann::json to_json() const;
};

// Whitespace tokens of the normalized text. Case and punctuation are kept.
std::vector<std::string> tokenize(std::string_view text);

// GLEU over n = 1..4: min of n-gram precision and recall, where matches are
// clipped counts summed over all orders and each side's total is its number
// of n-grams. Empty hypothesis scores 0; both empty score 1.
double gleu(const std::vector<std::string> &hypothesis,
            const std::vector<std::string> &reference);

// Bag-of-tokens F1. Empty against empty is 1, empty against non-empty 0.
double token_f1(const std::vector<std::string> &hypothesis,
                const std::vector<std::string> &reference);

// token_f1 against the concatenated normalized contents of the given pages.
// With no pages the score is 1 for an empty hypothesis and 0 otherwise.
double kf1(const std::vector<std::string> &hypothesis,
           const std::vector<const Reference *> &gold_pages);

struct RefPRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Set precision, recall and F1 over unique normalized titles.
RefPRF ref_prf(const std::set<std::string> &generated,
               const std::set<std::string> &gold);

// Fraction of generated titles with no corpus page; 0 with no titles.
double halluc_rate(const std::set<std::string> &generated, const Corpus &corpus);

// Index of the report with the highest selection_sum, lowest index on ties.
size_t best_of_k(const std::vector<MetricReport> &reports);

class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Sample Pearson correlation. Throws UndefinedCorrelation for fewer than two
// points or zero variance, std::invalid_argument on length mismatch.
double pearson(const std::vector<double> &xs, const std::vector<double> &ys);

// Normalized titles of every mention in `text`.
std::set<std::string> mentioned_titles(std::string_view text);

// Scores generated text against a gold proof document.
MetricReport score_proof(std::string_view generated, const ProofDocument &gold,
                         const Corpus &corpus);

// Scores a generated step against a single gold step. Grounding metrics use
// the references the gold step mentions.
MetricReport score_step(std::string_view generated, const ProofStep &gold,
                        const Corpus &corpus);

// Arithmetic mean per field; all zeros for an empty list.
MetricReport mean_report(const std::vector<MetricReport> &reports);

}  // namespace groundproof

#endif  // GROUNDPROOF_METRICS_H_
