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

#include "groundproof/metrics.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace groundproof {

namespace {

constexpr int kMaxOrder = 4;

using NgramCounts = std::unordered_map<std::string, int>;

// Counts n-grams of orders 1..kMaxOrder keyed by their joined tokens. The
// order is part of the key through the number of separators.
NgramCounts CountNgrams(const std::vector<std::string> &tokens, long &total) {
  NgramCounts counts;
  total = 0;
  for (int n = 1; n <= kMaxOrder; ++n) {
    for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
      std::string key = tokens[i];
      for (int k = 1; k < n; ++k) {
        key.push_back('\x1f');
        key += tokens[i + static_cast<size_t>(k)];
      }
      ++counts[key];
      ++total;
    }
  }
  return counts;
}

double Harmonic(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

}  // namespace

MetricReport MetricReport::FromValues(const std::array<double, 7> &v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  auto v = values();
  for (size_t i = 0; i < v.size(); ++i) j[kFieldNames[i]] = v[i];
  return j;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in(normalize(text));
  std::string token;
  while (in >> token) tokens.push_back(std::move(token));
  return tokens;
}

double gleu(const std::vector<std::string> &hypothesis,
            const std::vector<std::string> &reference) {
  if (hypothesis.empty()) return reference.empty() ? 1.0 : 0.0;
  long hyp_total = 0, ref_total = 0;
  NgramCounts hyp = CountNgrams(hypothesis, hyp_total);
  NgramCounts ref = CountNgrams(reference, ref_total);
  long matches = 0;
  for (const auto &[gram, count] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) matches += std::min(count, it->second);
  }
  double precision = static_cast<double>(matches) / static_cast<double>(hyp_total);
  double recall =
      ref_total == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(ref_total);
  return std::min(precision, recall);
}

double token_f1(const std::vector<std::string> &hypothesis,
                const std::vector<std::string> &reference) {
  if (hypothesis.empty() && reference.empty()) return 1.0;
  if (hypothesis.empty() || reference.empty()) return 0.0;
  std::unordered_map<std::string, int> ref_counts;
  for (const std::string &t : reference) ++ref_counts[t];
  long overlap = 0;
  for (const std::string &t : hypothesis) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  double p = static_cast<double>(overlap) / static_cast<double>(hypothesis.size());
  double r = static_cast<double>(overlap) / static_cast<double>(reference.size());
  return Harmonic(p, r);
}

double kf1(const std::vector<std::string> &hypothesis,
           const std::vector<const Reference *> &gold_pages) {
  if (gold_pages.empty()) return hypothesis.empty() ? 1.0 : 0.0;
  std::string knowledge;
  for (const Reference *page : gold_pages) {
    knowledge += page->content_text();
    knowledge += '\n';
  }
  return token_f1(hypothesis, tokenize(knowledge));
}

RefPRF ref_prf(const std::set<std::string> &generated,
               const std::set<std::string> &gold) {
  if (generated.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  size_t common = 0;
  for (const std::string &t : generated) common += gold.count(t);
  RefPRF out;
  out.precision = generated.empty()
                      ? 0.0
                      : static_cast<double>(common) / static_cast<double>(generated.size());
  out.recall =
      gold.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(gold.size());
  out.f1 = Harmonic(out.precision, out.recall);
  return out;
}

double halluc_rate(const std::set<std::string> &generated, const Corpus &corpus) {
  if (generated.empty()) return 0.0;
  size_t missing = 0;
  for (const std::string &t : generated) {
    if (!corpus.resolves(t)) ++missing;
  }
  return static_cast<double>(missing) / static_cast<double>(generated.size());
}

size_t best_of_k(const std::vector<MetricReport> &reports) {
  if (reports.empty()) throw std::invalid_argument("best_of_k needs at least one report");
  size_t best = 0;
  for (size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].selection_sum() > reports[best].selection_sum()) best = i;
  }
  return best;
}

double pearson(const std::vector<double> &xs, const std::vector<double> &ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("pearson needs equally long inputs");
  }
  if (xs.size() < 2) throw UndefinedCorrelation("pearson needs at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelation("pearson is undefined for zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::set<std::string> mentioned_titles(std::string_view text) {
  std::set<std::string> titles;
  for (const ReferenceMention &m : parse_mentions(text)) titles.insert(m.key());
  return titles;
}

namespace {

MetricReport ScoreAgainst(std::string_view generated, std::string_view gold_text,
                          const std::vector<std::string> &gold_titles,
                          const Corpus &corpus) {
  MetricReport report;
  std::vector<std::string> hyp = tokenize(generated);
  std::vector<std::string> ref = tokenize(gold_text);
  report.gleu = gleu(hyp, ref);
  report.token_f1 = token_f1(hyp, ref);

  std::vector<const Reference *> pages;
  for (const std::string &title : gold_titles) {
    if (const Reference *page = corpus.find_by_title(title)) pages.push_back(page);
  }
  report.kf1 = kf1(hyp, pages);

  std::set<std::string> generated_titles = mentioned_titles(generated);
  std::set<std::string> gold_set(gold_titles.begin(), gold_titles.end());
  RefPRF prf = ref_prf(generated_titles, gold_set);
  report.ref_p = prf.precision;
  report.ref_r = prf.recall;
  report.ref_f1 = prf.f1;
  report.halluc = halluc_rate(generated_titles, corpus);
  return report;
}

}  // namespace

MetricReport score_proof(std::string_view generated, const ProofDocument &gold,
                         const Corpus &corpus) {
  return ScoreAgainst(generated, gold.text(), gold.ref_titles, corpus);
}

MetricReport score_step(std::string_view generated, const ProofStep &gold,
                        const Corpus &corpus) {
  ProofDocument doc = ProofDocument::FromSteps({gold});
  return ScoreAgainst(generated, gold.raw, doc.ref_titles, corpus);
}

MetricReport mean_report(const std::vector<MetricReport> &reports) {
  std::array<double, 7> sums{};
  for (const MetricReport &r : reports) {
    auto v = r.values();
    for (size_t i = 0; i < v.size(); ++i) sums[i] += v[i];
  }
  if (!reports.empty()) {
    for (double &s : sums) s /= static_cast<double>(reports.size());
  }
  return MetricReport::FromValues(sums);
}

}  // namespace groundproof
