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

#include "groundproof/corpus.h"

#include <random>

#include "doctest.h"
#include "test_util.h"

using namespace groundproof;

TEST_CASE("mention with namespace, underscore title and surface") {
  auto ms = parse_mentions("so $n$ is [[Definition:Even_Integer|even]].");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].kind == MentionKind::kDefinition);
  CHECK(ms[0].prefix == "Definition");
  CHECK(ms[0].title == "Even_Integer");
  CHECK(ms[0].surface == "even");
  CHECK(ms[0].key() == "Definition:Even Integer");
  CHECK(ms[0].span.begin == 10);
  CHECK(ms[0].span.end == 42);
  CHECK(normalize("[[Definition:Even_Integer|even]]") == "even");
}

TEST_CASE("mention without pipe renders its target") {
  auto ms = parse_mentions("[[Axiom:Distributive_Law]] and [[Zero is Even]]");
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].kind == MentionKind::kAxiom);
  CHECK(ms[0].surface == "Axiom:Distributive Law");
  CHECK(ms[1].kind == MentionKind::kTheorem);
  CHECK(ms[1].prefix.empty());
  CHECK(ms[1].key() == "Zero is Even");
  CHECK(render_mention(ms[1]) == "[[Zero is Even]]");
}

TEST_CASE("colon inside a main namespace title is not a prefix") {
  auto ms = parse_mentions("[[Sum of 2 Squares: Corollary|it]]");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].prefix.empty());
  CHECK(ms[0].title == "Sum of 2 Squares: Corollary");
}

TEST_CASE("malformed brackets stay text and warn") {
  std::vector<std::string> warnings;
  CHECK(parse_mentions("[[Definition:Open", &warnings).empty());
  CHECK(warnings.size() == 1);
  warnings.clear();
  CHECK(parse_mentions("a [[]] b [[ | x]]", &warnings).empty());
  CHECK(warnings.size() == 2);
  warnings.clear();
  auto ms = parse_mentions("[[broken [[Definition:Set|set]]", &warnings);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].key() == "Definition:Set");
  CHECK(warnings.size() == 1);
}

TEST_CASE("empty pipe surface falls back to the target") {
  auto ms = parse_mentions("[[Definition:Set|]]");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].surface == "Definition:Set");
}

TEST_CASE("normalize_title") {
  CHECK(normalize_title("Definition:Even_Integer") == "Definition:Even Integer");
  CHECK(normalize_title("  Even__Integer \t x ") == "Even Integer x");
  CHECK(normalize_title("even integer") != normalize_title("Even Integer"));
}

namespace {

std::string RandomWord(std::mt19937 &rng) {
  static const char *kWords[] = {"Even", "Integer", "Set", "Prime", "of", "is",
                                 "Sum", "Ring", "2", "Group", "x_1"};
  return kWords[rng() % (sizeof(kWords) / sizeof(kWords[0]))];
}

std::string RandomText(std::mt19937 &rng) {
  static const char *kText[] = {"Let ", "$x + y$", " then ", ", so ", "\n", "we have ",
                                ". ", "{{eqn | l = a | r = b}}", "$\\paren {a}$ "};
  std::string out;
  int n = static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) out += kText[rng() % (sizeof(kText) / sizeof(kText[0]))];
  return out;
}

}  // namespace

TEST_CASE("100 random mention-bearing strings round-trip") {
  std::mt19937 rng(20261018);
  static const char *kPrefixes[] = {"", "Definition", "Axiom", "Theorem", "Category"};
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<ReferenceMention> planted;
    std::string text = RandomText(rng);
    int count = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < count; ++i) {
      ReferenceMention m;
      m.prefix = kPrefixes[rng() % 5];
      int words = 1 + static_cast<int>(rng() % 3);
      for (int w = 0; w < words; ++w) m.title += (w ? (rng() % 2 ? "_" : " ") : "") + RandomWord(rng);
      if (rng() % 2) {
        m.surface = RandomWord(rng) + (rng() % 2 ? " " + RandomWord(rng) : "");
      } else {
        m.surface = m.key();
      }
      planted.push_back(m);
      text += render_mention(m);
      text += RandomText(rng);
    }
    auto parsed = parse_mentions(text);
    REQUIRE(parsed.size() == planted.size());
    std::string rebuilt;
    size_t pos = 0;
    for (size_t i = 0; i < parsed.size(); ++i) {
      CHECK(parsed[i].prefix == planted[i].prefix);
      CHECK(parsed[i].title == planted[i].title);
      CHECK(parsed[i].surface == planted[i].surface);
      CHECK(parsed[i].key() == planted[i].key());
      rebuilt += text.substr(pos, parsed[i].span.begin - pos);
      rebuilt += render_mention(parsed[i]);
      pos = parsed[i].span.end;
    }
    rebuilt += text.substr(pos);
    CHECK(rebuilt == text);
  }
}

TEST_CASE("normalize renders templates and deletes markers") {
  CHECK(normalize("{{eqn | l = a + b | o = = | r = 2 r | c = by [[Axiom:Distributive Law]] }}") ==
        "a + b = 2 r by Axiom:Distributive Law");
  CHECK(normalize("{{begin-eqn}}\n{{eqn | r = 2 k}}\n{{end-eqn}} done {{qed}}") == "2 k done");
  CHECK(normalize("{{Link|Definition:Set}} holds") == "Definition:Set holds");
  CHECK(normalize("  a \n\n b\t c ") == "a b c");
  CHECK(normalize("{{qed|lemma}}").empty());
  CHECK(normalize("{{eqn | c = {{qed}} x}}") == "x");
}

TEST_CASE("normalize is idempotent on random markup") {
  std::mt19937 rng(7);
  static const char *kPieces[] = {"[[", "]]", "{{", "}}", "|", "=", "a", " ", "\n",
                                  "Definition:", "eqn", "qed", "l", "x_y", "$"};
  for (int iter = 0; iter < 500; ++iter) {
    std::string s;
    int n = static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) s += kPieces[rng() % 15];
    std::string once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("segmentation merges colon lines and display blocks") {
  const Corpus &corpus = gptest::FixtureCorpus();
  const Example *ex = corpus.find_example(1);
  REQUIRE(ex);
  REQUIRE(ex->proof.steps.size() == 3);
  CHECK(ex->proof.steps[0].lines.size() == 1);
  CHECK(ex->proof.steps[1].lines.size() == 3);
  CHECK(ex->proof.steps[1].lines[0] == "Then:");
  CHECK(ex->proof.steps[2].lines.size() == 2);
  CHECK(ex->proof.steps[2].lines[1] == "{{qed}}");
  CHECK(ex->proof.ref_titles ==
        std::vector<std::string>{"Definition:Even Integer", "Axiom:Distributive Law"});
}

TEST_CASE("blank lines delimit steps even after a colon") {
  ProofDocument doc = segment_proof("We have:\n\n$$x = 1$$\nSo:\n:$y = 2$\n\n\nDone.");
  REQUIRE(doc.steps.size() == 4);
  CHECK(doc.steps[0].raw == "We have:");
  CHECK(doc.steps[1].raw == "$$x = 1$$");
  CHECK(doc.steps[2].raw == "So:\n:$y = 2$");
  CHECK(doc.steps[3].raw == "Done.");
  CHECK(segment_proof("a\n$$b$$").steps.size() == 1);
  CHECK(segment_proof("").steps.empty());
  CHECK_FALSE(segment_proof("\n \n").valid());
}

TEST_CASE("segmentation reaches a fixpoint") {
  std::mt19937 rng(99);
  static const char *kLines[] = {"Let $x$ be even.", "Then:", "{{eqn | l = x | r = 2}}",
                                 "$$a = b$$", ":$c$", "", "Hence [[Zero is Even]].",
                                 "So", "{{qed}}"};
  for (int iter = 0; iter < 300; ++iter) {
    std::string raw;
    int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) raw += std::string(kLines[rng() % 9]) + "\n";
    ProofDocument once = segment_proof(raw);
    ProofDocument twice = segment_proof(once.text());
    REQUIRE(once.steps.size() == twice.steps.size());
    for (size_t i = 0; i < once.steps.size(); ++i) {
      CHECK(once.steps[i].raw == twice.steps[i].raw);
    }
    CHECK(once.ref_titles == twice.ref_titles);
  }
}

TEST_CASE("json and json-lines corpora agree") {
  const Corpus &a = gptest::FixtureCorpus();
  Corpus b = load_corpus(gptest::Fixture("corpus.jsonl"), Corpus::Format::kJsonLines);
  REQUIRE(a.references().size() == b.references().size());
  REQUIRE(a.examples().size() == b.examples().size());
  for (size_t i = 0; i < a.examples().size(); ++i) {
    CHECK(a.examples()[i].proof.text() == b.examples()[i].proof.text());
  }
  CHECK(a.split(Split::kTest) == b.split(Split::kTest));
  CHECK(a.find_by_title("Definition:Even_Integer")->id == 2);
  CHECK(a.find_by_title("definition:even integer") == nullptr);
  CHECK(a.split_of(8) == Split::kValid);
  CHECK(a.diagnostics().empty());
}

TEST_CASE("duplicate normalized titles name both pages") {
  try {
    load_corpus(gptest::Fixture("duplicate_titles.json"));
    FAIL("expected CorpusError");
  } catch (const CorpusError &e) {
    std::string msg = e.what();
    CHECK(msg.find("Definition:Even Integer") != std::string::npos);
    CHECK(msg.find("id 1") != std::string::npos);
    CHECK(msg.find("id 2") != std::string::npos);
  }
}

TEST_CASE("corpus validation errors") {
  auto bad = [](const std::string &json) {
    CHECK_THROWS_AS(parse_corpus(json), CorpusError);
  };
  bad(R"({"references": [{"id": 1, "kind": "theorem", "title": "T"}],
          "splits": {"train": [1], "test": [1]}})");
  bad(R"({"references": [{"id": 1, "kind": "theorem", "title": "T"}],
          "splits": {"train": [2]}})");
  bad(R"({"references": [{"id": 1, "kind": "definition", "title": "D"}],
          "examples": [{"theorem_id": 1, "proof": "x"}]})");
  bad(R"({"references": [{"id": 1, "kind": "theorem", "title": "T"}],
          "examples": [{"theorem_id": 3, "proof": "x"}]})");
  bad(R"({"references": [{"id": 1, "kind": "theorem", "title": "T"},
                         {"id": 1, "kind": "theorem", "title": "U"}]})");
  bad(R"({"references": [{"id": 1, "kind": "lemma", "title": "T"}]})");
  bad("[1, 2]");
  bad("{not json");
  try {
    parse_corpus(R"({"references": [{"id": 4, "kind": "theorem"}]})");
    FAIL("expected CorpusError");
  } catch (const CorpusError &e) {
    std::string msg = e.what();
    CHECK(msg.find("references[0] (id 4)") != std::string::npos);
    CHECK(msg.find("'title'") != std::string::npos);
  }
}

TEST_CASE("dangling mentions become diagnostics") {
  Corpus c = parse_corpus(R"({"references": [{"id": 1, "kind": "theorem", "title": "T"}],
      "examples": [{"theorem_id": 1, "proof": "By [[Definition:Missing]]."}],
      "splits": {"test": [1]}})");
  REQUIRE(c.diagnostics().size() == 1);
  CHECK(c.diagnostics()[0].title == "Definition:Missing");
  CHECK(c.diagnostics()[0].split == Split::kTest);
}
