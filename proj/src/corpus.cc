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

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace groundproof {

using json = nlohmann::json;

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view RightTrim(std::string_view s) {
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::string CollapseWhitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

// A namespace prefix is a single alphabetic word before the first colon.
bool LooksLikeNamespace(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
  });
}

MentionKind KindForPrefix(std::string_view prefix) {
  if (prefix.empty() || prefix == "Theorem") return MentionKind::kTheorem;
  if (prefix == "Definition") return MentionKind::kDefinition;
  if (prefix == "Axiom") return MentionKind::kAxiom;
  return MentionKind::kOther;
}

std::string FullTarget(const ReferenceMention &m) {
  if (m.prefix.empty()) return m.title;
  return m.prefix + ":" + m.title;
}

// Splits template contents on '|' at nesting depth zero.
std::vector<std::string_view> SplitTemplateArgs(std::string_view body) {
  std::vector<std::string_view> parts;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < body.size(); ++i) {
    if (body.compare(i, 2, "{{") == 0) {
      ++depth;
      ++i;
    } else if (body.compare(i, 2, "}}") == 0 && depth > 0) {
      --depth;
      ++i;
    } else if (body[i] == '|' && depth == 0) {
      parts.push_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(body.substr(start));
  return parts;
}

// Returns the offset just past the "}}" matching the "{{" at `open`, or
// npos when the template is unclosed.
size_t MatchTemplate(std::string_view text, size_t open) {
  int depth = 0;
  for (size_t i = open; i + 1 < text.size(); ++i) {
    if (text.compare(i, 2, "{{") == 0) {
      ++depth;
      ++i;
    } else if (text.compare(i, 2, "}}") == 0) {
      if (--depth == 0) return i + 2;
      ++i;
    }
  }
  return std::string_view::npos;
}

std::string RenderTemplates(std::string_view text);

std::string RenderTemplate(std::string_view body) {
  std::vector<std::string_view> parts = SplitTemplateArgs(body);
  std::string name(Trim(parts.front()));
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  if (name == "qed" || name == "begin-eqn" || name == "end-eqn") return "";

  std::vector<std::pair<std::string, std::string>> args;
  for (size_t i = 1; i < parts.size(); ++i) {
    std::string_view arg = parts[i];
    std::string key;
    size_t eq = arg.find('=');
    if (eq != std::string_view::npos) {
      std::string_view candidate = Trim(arg.substr(0, eq));
      bool named = !candidate.empty() &&
                   std::all_of(candidate.begin(), candidate.end(), [](char c) {
                     return std::isalnum(static_cast<unsigned char>(c)) ||
                            c == '_' || c == '-' || c == ' ';
                   });
      if (named) {
        key = std::string(candidate);
        arg = arg.substr(eq + 1);
      }
    }
    args.emplace_back(key, std::string(Trim(RenderTemplates(arg))));
  }

  std::vector<std::string> values;
  if (name == "eqn") {
    for (const char *slot : {"l", "o", "r", "c"}) {
      for (const auto &[key, value] : args) {
        if (key == slot && !value.empty()) values.push_back(value);
      }
    }
  } else {
    for (const auto &[key, value] : args) {
      if (!value.empty()) values.push_back(value);
    }
  }
  return Join(values, " ");
}

std::string RenderTemplates(std::string_view text) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    size_t close = MatchTemplate(text, open);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    out.push_back(' ');
    out.append(RenderTemplate(text.substr(open + 2, close - open - 4)));
    out.push_back(' ');
    pos = close;
  }
  out.append(text.substr(pos));
  return out;
}

std::string ReplaceMentions(std::string_view text) {
  std::string out;
  size_t pos = 0;
  for (const ReferenceMention &m : parse_mentions(text)) {
    out.append(text.substr(pos, m.span.begin - pos));
    out.append(m.surface);
    pos = m.span.end;
  }
  out.append(text.substr(pos));
  return out;
}

std::string RemoveBracketResidue(std::string s) {
  static const char *kTokens[] = {"[[", "]]", "{{", "}}"};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const char *token : kTokens) {
      size_t at;
      while ((at = s.find(token)) != std::string::npos) {
        s.replace(at, 2, " ");
        changed = true;
      }
    }
  }
  return s;
}

std::string NormalizeOnce(std::string_view text) {
  std::string s = ReplaceMentions(text);
  s = RenderTemplates(s);
  s = RemoveBracketResidue(std::move(s));
  return CollapseWhitespace(s);
}

bool OpensDisplayBlock(std::string_view line) {
  std::string_view t = Trim(line);
  return t.starts_with("{{") || t.starts_with("$$") || t.starts_with(":$");
}

}  // namespace

const char *MentionKindName(MentionKind kind) {
  switch (kind) {
    case MentionKind::kDefinition: return "Definition";
    case MentionKind::kTheorem: return "Theorem";
    case MentionKind::kAxiom: return "Axiom";
    case MentionKind::kOther: return "Other";
  }
  return "Other";
}

std::string ReferenceMention::key() const {
  return normalize_title(FullTarget(*this));
}

std::string normalize_title(std::string_view title) {
  std::string s(title);
  std::replace(s.begin(), s.end(), '_', ' ');
  return CollapseWhitespace(s);
}

std::vector<ReferenceMention> parse_mentions(std::string_view text,
                                             std::vector<std::string> *warnings) {
  std::vector<ReferenceMention> mentions;
  auto warn = [&](std::string message) {
    if (warnings != nullptr) warnings->push_back(std::move(message));
  };
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find("[[", pos);
    if (open == std::string_view::npos) break;
    size_t close = text.find("]]", open + 2);
    if (close == std::string_view::npos) {
      warn("unclosed '[[' at offset " + std::to_string(open));
      break;
    }
    size_t reopen = text.find("[[", open + 2);
    if (reopen < close) {
      warn("unclosed '[[' at offset " + std::to_string(open));
      pos = reopen;
      continue;
    }
    std::string_view inner = text.substr(open + 2, close - open - 2);
    std::string_view target = inner;
    std::string_view surface;
    bool piped = false;
    if (size_t bar = inner.find('|'); bar != std::string_view::npos) {
      target = inner.substr(0, bar);
      surface = Trim(inner.substr(bar + 1));
      piped = true;
    }
    target = Trim(target);
    if (target.empty()) {
      warn("empty mention target at offset " + std::to_string(open));
      pos = close + 2;
      continue;
    }

    ReferenceMention m;
    size_t colon = target.find(':');
    if (colon != std::string_view::npos &&
        LooksLikeNamespace(target.substr(0, colon))) {
      m.prefix = std::string(target.substr(0, colon));
      m.title = std::string(Trim(target.substr(colon + 1)));
    } else {
      m.title = std::string(target);
    }
    m.kind = KindForPrefix(m.prefix);
    m.surface = piped && !surface.empty() ? std::string(surface) : m.key();
    m.span = {open, close + 2};
    if (m.surface.empty()) {
      warn("mention with empty title at offset " + std::to_string(open));
      pos = close + 2;
      continue;
    }
    mentions.push_back(std::move(m));
    pos = close + 2;
  }
  return mentions;
}

std::string render_mention(const ReferenceMention &mention) {
  std::string target = FullTarget(mention);
  if (mention.surface == mention.key()) return "[[" + target + "]]";
  return "[[" + target + "|" + mention.surface + "]]";
}

std::string normalize(std::string_view text) {
  std::string current = NormalizeOnce(text);
  // Every rewrite strictly shortens the string, so this terminates.
  for (;;) {
    std::string next = NormalizeOnce(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

const char *ReferenceKindName(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::kTheorem: return "theorem";
    case ReferenceKind::kDefinition: return "definition";
    case ReferenceKind::kOther: return "other";
  }
  return "other";
}

std::optional<ReferenceKind> ParseReferenceKind(std::string_view name) {
  if (name == "theorem") return ReferenceKind::kTheorem;
  if (name == "definition") return ReferenceKind::kDefinition;
  if (name == "other") return ReferenceKind::kOther;
  return std::nullopt;
}

std::string Reference::content_text() const { return Join(content, "\n"); }

ProofStep ProofStep::FromLines(std::vector<std::string> lines) {
  ProofStep step;
  step.raw = Join(lines, "\n");
  step.lines = std::move(lines);
  step.mentions = parse_mentions(step.raw);
  return step;
}

ProofDocument ProofDocument::FromSteps(std::vector<ProofStep> steps) {
  ProofDocument doc;
  std::set<std::string> seen;
  for (const ProofStep &step : steps) {
    for (const ReferenceMention &m : step.mentions) {
      std::string key = m.key();
      if (seen.insert(key).second) doc.ref_titles.push_back(std::move(key));
    }
  }
  doc.steps = std::move(steps);
  return doc;
}

std::set<std::string> ProofDocument::ref_title_set() const {
  return {ref_titles.begin(), ref_titles.end()};
}

std::string ProofDocument::text(std::string_view separator) const {
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out.append(separator);
    out.append(steps[i].raw);
  }
  return out;
}

ProofDocument segment_proof(std::string_view raw_proof) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= raw_proof.size()) {
    size_t nl = raw_proof.find('\n', start);
    if (nl == std::string_view::npos) nl = raw_proof.size();
    lines.push_back(RightTrim(raw_proof.substr(start, nl - start)));
    start = nl + 1;
  }

  std::vector<ProofStep> steps;
  std::vector<std::string> current;
  auto flush = [&] {
    if (!current.empty()) steps.push_back(ProofStep::FromLines(std::move(current)));
    current.clear();
  };
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      flush();
      continue;
    }
    current.emplace_back(lines[i]);
    bool has_next = i + 1 < lines.size() && !lines[i + 1].empty();
    bool merge = has_next && (lines[i].ends_with(':') ||
                              OpensDisplayBlock(lines[i + 1]));
    if (!merge) flush();
  }
  flush();
  return ProofDocument::FromSteps(std::move(steps));
}

const char *SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid" || name == "dev") return Split::kValid;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

Corpus::Corpus(std::vector<Reference> references, std::vector<Example> examples,
               std::map<Split, std::vector<int>> splits)
    : references_(std::move(references)),
      examples_(std::move(examples)),
      splits_(std::move(splits)) {
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) splits_[s];

  for (size_t i = 0; i < references_.size(); ++i) {
    const Reference &ref = references_[i];
    std::string key = normalize_title(ref.title);
    if (key.empty()) {
      throw CorpusError("reference id " + std::to_string(ref.id) +
                        ": field 'title' is empty");
    }
    auto [it, inserted] = by_title_.emplace(key, i);
    if (!inserted) {
      const Reference &other = references_[it->second];
      throw CorpusError("duplicate title '" + key + "': reference id " +
                        std::to_string(other.id) + " ('" + other.title +
                        "') and reference id " + std::to_string(ref.id) +
                        " ('" + ref.title + "')");
    }
    if (!by_id_.emplace(ref.id, i).second) {
      throw CorpusError("duplicate reference id " + std::to_string(ref.id));
    }
  }

  for (const auto &[split, ids] : splits_) {
    for (int id : ids) {
      if (by_id_.find(id) == by_id_.end()) {
        throw CorpusError(std::string("split '") + SplitName(split) +
                          "' lists unknown theorem id " + std::to_string(id));
      }
      auto [it, inserted] = split_by_theorem_.emplace(id, split);
      if (!inserted && it->second != split) {
        throw CorpusError("theorem id " + std::to_string(id) +
                          " appears in splits '" + SplitName(it->second) +
                          "' and '" + SplitName(split) + "'");
      }
    }
  }

  for (size_t i = 0; i < examples_.size(); ++i) {
    const Example &ex = examples_[i];
    const Reference *theorem = find_by_id(ex.theorem_id);
    if (theorem == nullptr) {
      throw CorpusError("example " + std::to_string(i) +
                        ": field 'theorem_id' refers to unknown reference " +
                        std::to_string(ex.theorem_id));
    }
    if (theorem->kind != ReferenceKind::kTheorem) {
      throw CorpusError("example " + std::to_string(i) + ": theorem_id " +
                        std::to_string(ex.theorem_id) +
                        " is not a theorem page");
    }
    if (!example_by_theorem_.emplace(ex.theorem_id, i).second) {
      throw CorpusError("duplicate example for theorem id " +
                        std::to_string(ex.theorem_id));
    }
    for (const std::string &title : ex.proof.ref_titles) {
      if (!resolves(title)) {
        diagnostics_.push_back({ex.theorem_id, split_of(ex.theorem_id), title});
      }
    }
  }
}

const std::vector<int> &Corpus::split(Split split) const {
  return splits_.at(split);
}

const Reference *Corpus::find_by_title(std::string_view title) const {
  auto it = by_title_.find(normalize_title(title));
  return it == by_title_.end() ? nullptr : &references_[it->second];
}

const Reference *Corpus::find_by_id(int id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &references_[it->second];
}

const Example *Corpus::find_example(int theorem_id) const {
  auto it = example_by_theorem_.find(theorem_id);
  return it == example_by_theorem_.end() ? nullptr : &examples_[it->second];
}

std::optional<Split> Corpus::split_of(int theorem_id) const {
  auto it = split_by_theorem_.find(theorem_id);
  if (it == split_by_theorem_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string RecordLabel(std::string_view section, size_t index,
                        const json &record, const char *id_field) {
  std::string label = std::string(section) + "[" + std::to_string(index) + "]";
  if (record.is_object() && record.contains(id_field) &&
      record[id_field].is_number_integer()) {
    label += " (id " + std::to_string(record[id_field].get<int>()) + ")";
  }
  return label;
}

[[noreturn]] void FieldError(const std::string &label, const char *field,
                             const char *problem) {
  throw CorpusError(label + ": field '" + field + "' " + problem);
}

Reference ParseReference(const json &record, const std::string &label) {
  if (!record.is_object()) throw CorpusError(label + ": not an object");
  Reference ref;
  if (!record.contains("id") || !record["id"].is_number_integer()) {
    FieldError(label, "id", "missing or not an integer");
  }
  ref.id = record["id"].get<int>();
  if (!record.contains("kind") || !record["kind"].is_string()) {
    FieldError(label, "kind", "missing or not a string");
  }
  auto kind = ParseReferenceKind(record["kind"].get<std::string>());
  if (!kind) FieldError(label, "kind", "must be theorem, definition or other");
  ref.kind = *kind;
  if (!record.contains("title") || !record["title"].is_string()) {
    FieldError(label, "title", "missing or not a string");
  }
  ref.title = record["title"].get<std::string>();
  if (record.contains("contents")) {
    const json &contents = record["contents"];
    if (!contents.is_array()) FieldError(label, "contents", "is not an array");
    for (const json &line : contents) {
      if (!line.is_string()) {
        FieldError(label, "contents", "contains a non-string line");
      }
      ref.content.push_back(line.get<std::string>());
    }
  }
  ref.mentions = parse_mentions(ref.content_text());
  return ref;
}

Example ParseExample(const json &record, const std::string &label) {
  if (!record.is_object()) throw CorpusError(label + ": not an object");
  Example ex;
  if (!record.contains("theorem_id") || !record["theorem_id"].is_number_integer()) {
    FieldError(label, "theorem_id", "missing or not an integer");
  }
  ex.theorem_id = record["theorem_id"].get<int>();
  if (!record.contains("proof") || !record["proof"].is_string()) {
    FieldError(label, "proof", "missing or not a string");
  }
  ex.proof = segment_proof(record["proof"].get<std::string>());
  if (!ex.proof.valid()) FieldError(label, "proof", "is empty");
  return ex;
}

void ParseSplits(const json &record, std::map<Split, std::vector<int>> &splits) {
  if (!record.is_object()) throw CorpusError("splits: not an object");
  for (const auto &[name, ids] : record.items()) {
    if (name == "type") continue;
    auto split = ParseSplit(name);
    if (!split) throw CorpusError("splits: unknown split '" + name + "'");
    if (!ids.is_array()) {
      throw CorpusError("splits: field '" + name + "' is not an array");
    }
    for (const json &id : ids) {
      if (!id.is_number_integer()) {
        throw CorpusError("splits: field '" + name + "' has a non-integer id");
      }
      splits[*split].push_back(id.get<int>());
    }
  }
}

}  // namespace

Corpus parse_corpus(std::string_view data, Corpus::Format format) {
  std::vector<Reference> references;
  std::vector<Example> examples;
  std::map<Split, std::vector<int>> splits;

  if (format == Corpus::Format::kJson) {
    json doc;
    try {
      doc = json::parse(data);
    } catch (const json::parse_error &e) {
      throw CorpusError(std::string("corpus is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CorpusError("corpus root is not an object");
    if (!doc.contains("references") || !doc["references"].is_array()) {
      throw CorpusError("corpus: field 'references' missing or not an array");
    }
    const json &refs = doc["references"];
    for (size_t i = 0; i < refs.size(); ++i) {
      references.push_back(
          ParseReference(refs[i], RecordLabel("references", i, refs[i], "id")));
    }
    if (doc.contains("examples")) {
      const json &exs = doc["examples"];
      if (!exs.is_array()) throw CorpusError("corpus: field 'examples' is not an array");
      for (size_t i = 0; i < exs.size(); ++i) {
        examples.push_back(ParseExample(
            exs[i], RecordLabel("examples", i, exs[i], "theorem_id")));
      }
    }
    if (doc.contains("splits")) ParseSplits(doc["splits"], splits);
  } else {
    std::istringstream in{std::string(data)};
    std::string line;
    size_t line_no = 0;
    size_t n_refs = 0, n_examples = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (Trim(line).empty()) continue;
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error &e) {
        throw CorpusError("line " + std::to_string(line_no) +
                          ": not valid JSON: " + e.what());
      }
      std::string type = record.is_object() && record.contains("type") &&
                                 record["type"].is_string()
                             ? record["type"].get<std::string>()
                             : "";
      if (type == "reference") {
        references.push_back(ParseReference(
            record, RecordLabel("references", n_refs++, record, "id")));
      } else if (type == "example") {
        examples.push_back(ParseExample(
            record, RecordLabel("examples", n_examples++, record, "theorem_id")));
      } else if (type == "splits") {
        ParseSplits(record, splits);
      } else {
        throw CorpusError("line " + std::to_string(line_no) +
                          ": field 'type' must be reference, example or splits");
      }
    }
  }
  return Corpus(std::move(references), std::move(examples), std::move(splits));
}

Corpus load_corpus(const std::string &path, Corpus::Format format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), format);
}

}  // namespace groundproof
