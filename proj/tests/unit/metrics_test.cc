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

#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.h"

using namespace groundproof;

namespace {

using Tokens = std::vector<std::string>;

// Pairs every hypothesis n-gram with an unused equal reference n-gram.
double GleuOracle(const Tokens &h, const Tokens &r) {
  if (h.empty()) return r.empty() ? 1.0 : 0.0;
  long matches = 0, h_total = 0, r_total = 0;
  for (size_t n = 1; n <= 4; ++n) {
    std::vector<Tokens> hg, rg;
    for (size_t i = 0; i + n <= h.size(); ++i) hg.emplace_back(h.begin() + i, h.begin() + i + n);
    for (size_t i = 0; i + n <= r.size(); ++i) rg.emplace_back(r.begin() + i, r.begin() + i + n);
    h_total += static_cast<long>(hg.size());
    r_total += static_cast<long>(rg.size());
    std::vector<bool> used(rg.size(), false);
    for (const Tokens &g : hg) {
      for (size_t j = 0; j < rg.size(); ++j) {
        if (!used[j] && rg[j] == g) {
          used[j] = true;
          ++matches;
          break;
        }
      }
    }
  }
  double p = static_cast<double>(matches) / static_cast<double>(h_total);
  double rc = r_total == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(r_total);
  return p < rc ? p : rc;
}

double TokenF1Oracle(const Tokens &h, const Tokens &r) {
  if (h.empty() && r.empty()) return 1.0;
  if (h.empty() || r.empty()) return 0.0;
  std::vector<bool> used(r.size(), false);
  long overlap = 0;
  for (const std::string &t : h) {
    for (size_t j = 0; j < r.size(); ++j) {
      if (!used[j] && r[j] == t) {
        used[j] = true;
        ++overlap;
        break;
      }
    }
  }
  if (overlap == 0) return 0.0;
  double p = static_cast<double>(overlap) / static_cast<double>(h.size());
  double rc = static_cast<double>(overlap) / static_cast<double>(r.size());
  return 2.0 * p * rc / (p + rc);
}

Tokens RandomTokens(std::mt19937 &rng) {
  static const char *kVocab[] = {"a", "b", "c", "$x$", "is", "even", "."};
  Tokens out(rng() % 13);
  for (auto &t : out) t = kVocab[rng() % 7];
  return out;
}

}  // namespace

TEST_CASE("gleu and token_f1 equal brute-force oracles bit for bit") {
  std::mt19937 rng(42);
  auto start = std::chrono::steady_clock::now();
  for (int iter = 0; iter < 500; ++iter) {
    Tokens h = RandomTokens(rng), r = RandomTokens(rng);
    CHECK(gleu(h, r) == GleuOracle(h, r));
    CHECK(token_f1(h, r) == TokenF1Oracle(h, r));
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}

TEST_CASE("gleu hand examples") {
  CHECK(gleu({"a", "b"}, {"a", "b"}) == 1.0);
  // hyp n-grams: a, b, a b = 3; ref: a, b, c, a b, b c, a b c = 6; matches 3.
  CHECK(gleu({"a", "b"}, {"a", "b", "c"}) == 0.5);
  CHECK(gleu({}, {}) == 1.0);
  CHECK(gleu({}, {"a"}) == 0.0);
  CHECK(gleu({"a"}, {}) == 0.0);
  CHECK(token_f1({"a", "a", "b"}, {"a", "c"}) == doctest::Approx(0.4));
}

TEST_CASE("ref_prf fixture and empty conventions") {
  RefPRF r = ref_prf({"A", "B"}, {"A", "B", "C"});
  CHECK(std::abs(r.precision - 1.0) < 1e-12);
  CHECK(std::abs(r.recall - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(r.f1 - 0.8) < 1e-12);
  RefPRF both = ref_prf({}, {});
  CHECK(both.precision == 1.0);
  CHECK(both.recall == 1.0);
  CHECK(both.f1 == 1.0);
  RefPRF no_gen = ref_prf({}, {"A"});
  CHECK(no_gen.precision == 0.0);
  CHECK(no_gen.f1 == 0.0);
  RefPRF no_gold = ref_prf({"A"}, {});
  CHECK(no_gold.recall == 0.0);
  CHECK(no_gold.f1 == 0.0);
}

TEST_CASE("pearson fixtures") {
  CHECK(std::abs(pearson({1, 2, 3, 4}, {2, 4, 5, 9}) - 11.0 / std::sqrt(130.0)) < 1e-10);
  CHECK(std::abs(pearson({1, 2, 3, 4, 5}, {5, 3, 4, 1, 2}) + 0.8) < 1e-10);
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), UndefinedCorrelation);
  CHECK_THROWS_AS(pearson({1}, {2}), UndefinedCorrelation);
  CHECK_THROWS_AS(pearson({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("halluc, kf1 and best_of_k") {
  const Corpus &c = gptest::FixtureCorpus();
  CHECK(halluc_rate({}, c) == 0.0);
  CHECK(halluc_rate({"Definition:Even Integer", "Definition:Nope"}, c) == 0.5);
  CHECK(kf1({}, {}) == 1.0);
  CHECK(kf1({"x"}, {}) == 0.0);
  MetricReport a, b, d;
  a.gleu = 0.5;
  b.gleu = 0.5;
  b.ref_f1 = 0.2;
  b.halluc = 0.3;
  d.gleu = 0.6;
  CHECK(best_of_k({a, b, d}) == 2);
  CHECK(best_of_k({a, a}) == 0);
  CHECK_THROWS_AS(best_of_k({}), std::invalid_argument);
}

TEST_CASE("score_proof on a fixture example") {
  const Corpus &c = gptest::FixtureCorpus();
  const Example &ex = *c.find_example(4);
  MetricReport same = score_proof(ex.proof.text(), ex.proof, c);
  CHECK(same.gleu == 1.0);
  CHECK(same.token_f1 == 1.0);
  CHECK(same.ref_f1 == 1.0);
  CHECK(same.halluc == 0.0);
  MetricReport other =
      score_proof("By [[Definition:Double]], it is [[Definition:Even Integer|even]].", ex.proof, c);
  CHECK(other.ref_p == 0.5);
  CHECK(other.ref_r == 0.5);
  CHECK(other.halluc == 0.5);
  MetricReport step = score_step("", ex.proof.steps.front(), c);
  CHECK(step.gleu == 0.0);
  MetricReport mean = mean_report({same, other});
  CHECK(mean.ref_p == 0.75);
  CHECK(mean_report({}).gleu == 0.0);
  CHECK(same.to_json().size() == 7);
}
