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

#ifndef GROUNDPROOF_CORPUS_H_
#define GROUNDPROOF_CORPUS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace groundproof {

// Thrown by load_corpus for malformed or inconsistent corpus files.
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MentionKind { kDefinition, kTheorem, kAxiom, kOther };

const char *MentionKindName(MentionKind kind);

// Half-open byte range [begin, end) into a source string.
struct Span {
  size_t begin = 0;
  size_t end = 0;
  bool operator==(const Span &) const = default;
};

// An inline wiki link such as [[Definition:Even_Integer|even]].
struct ReferenceMention {
  MentionKind kind = MentionKind::kTheorem;
  // Namespace as written ("Definition"), empty for main-namespace links.
  std::string prefix;
  // Link target without the namespace prefix, as written.
  std::string title;
  std::string surface;
  Span span;

  // Normalized identity of the target page, namespace included.
  std::string key() const;

  bool operator==(const ReferenceMention &) const = default;
};

// Canonical title form: underscores become spaces, runs of whitespace
// collapse, ends are trimmed. Case is preserved.
std::string normalize_title(std::string_view title);

// Returns every [[...]] mention in `text`, left to right. Unclosed or empty
// brackets are left as plain text and described in `warnings` if given.
std::vector<ReferenceMention> parse_mentions(
    std::string_view text, std::vector<std::string> *warnings = nullptr);

// Renders a mention back to wiki syntax. The pipe is omitted when the
// surface equals the default rendering of the target.
std::string render_mention(const ReferenceMention &mention);

// Strips wiki markup for metric computation: mentions become their surface
// form, templates are expanded or deleted, whitespace is collapsed.
std::string normalize(std::string_view text);

enum class ReferenceKind { kTheorem, kDefinition, kOther };

// Lowercase name used in serialized formats: theorem, definition, other.
const char *ReferenceKindName(ReferenceKind kind);
std::optional<ReferenceKind> ParseReferenceKind(std::string_view name);

struct Reference {
  int id = 0;
  ReferenceKind kind = ReferenceKind::kOther;
  std::string title;
  std::vector<std::string> content;
  std::vector<ReferenceMention> mentions;

  // Content lines joined by newlines.
  std::string content_text() const;
};

struct ProofStep {
  std::vector<std::string> lines;
  std::string raw;
  std::vector<ReferenceMention> mentions;

  static ProofStep FromLines(std::vector<std::string> lines);
};

inline constexpr std::string_view kStepSeparator = "\n\n";

struct ProofDocument {
  std::vector<ProofStep> steps;
  // Unique normalized titles in order of first mention.
  std::vector<std::string> ref_titles;

  static ProofDocument FromSteps(std::vector<ProofStep> steps);

  bool valid() const { return !steps.empty(); }
  std::set<std::string> ref_title_set() const;
  // Steps joined with the step separator.
  std::string text(std::string_view separator = kStepSeparator) const;
};

// Splits a raw proof into steps. Blank lines always end a step; a line is
// merged with the following line when it ends in ':' or the following line
// opens a display block ("{{", "$$", ":$"). Otherwise each line is a step.
ProofDocument segment_proof(std::string_view raw_proof);

enum class Split { kTrain, kValid, kTest };

const char *SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

struct Example {
  int theorem_id = 0;
  ProofDocument proof;
};

struct DanglingMention {
  int theorem_id = 0;
  std::optional<Split> split;
  std::string title;
};

// Immutable after load.
class Corpus {
 public:
  enum class Format { kJson, kJsonLines };

  // Builds and validates a corpus. Throws CorpusError on duplicate
  // normalized titles, overlapping splits or unknown theorem ids.
  Corpus(std::vector<Reference> references, std::vector<Example> examples,
         std::map<Split, std::vector<int>> splits);

  const std::vector<Reference> &references() const { return references_; }
  const std::vector<Example> &examples() const { return examples_; }
  const std::vector<int> &split(Split split) const;
  const std::vector<DanglingMention> &diagnostics() const {
    return diagnostics_;
  }

  const Reference *find_by_title(std::string_view title) const;
  const Reference *find_by_id(int id) const;
  const Example *find_example(int theorem_id) const;
  std::optional<Split> split_of(int theorem_id) const;
  bool resolves(std::string_view title) const {
    return find_by_title(title) != nullptr;
  }

 private:
  std::vector<Reference> references_;
  std::vector<Example> examples_;
  std::map<Split, std::vector<int>> splits_;
  std::map<std::string, size_t, std::less<>> by_title_;
  std::map<int, size_t> by_id_;
  std::map<int, size_t> example_by_theorem_;
  std::map<int, Split> split_by_theorem_;
  std::vector<DanglingMention> diagnostics_;
};

Corpus load_corpus(const std::string &path,
                   Corpus::Format format = Corpus::Format::kJson);
Corpus parse_corpus(std::string_view data,
                    Corpus::Format format = Corpus::Format::kJson);

}  // namespace groundproof

#endif  // GROUNDPROOF_CORPUS_H_
