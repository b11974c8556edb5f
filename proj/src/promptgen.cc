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

#include "groundproof/promptgen.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

namespace groundproof {

namespace {

// Joins the non-empty pieces with single spaces.
std::string JoinTokens(std::initializer_list<std::string_view> pieces) {
  std::string out;
  for (std::string_view piece : pieces) {
    if (piece.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(piece);
  }
  return out;
}

std::string Slot(std::string_view value) {
  return value.empty() ? std::string() : " " + std::string(value);
}

bool ConsumePrefix(std::string_view &s, std::string_view prefix) {
  if (!s.starts_with(prefix)) return false;
  s.remove_prefix(prefix.size());
  return true;
}

// Reads the slot between the current position and " {close}", allowing
// an empty slot encoded as a single space before `close`.
std::optional<std::string> ReadSlot(std::string_view &s, std::string_view close) {
  if (!ConsumePrefix(s, " ")) return std::nullopt;
  if (ConsumePrefix(s, close)) return std::string();
  std::string marker = " " + std::string(close);
  size_t at = s.find(marker);
  if (at == std::string_view::npos) return std::nullopt;
  std::string value(s.substr(0, at));
  s.remove_prefix(at + marker.size());
  return value;
}

}  // namespace

void PromptBudgets::validate() const {
  if (max_prompt_tokens <= 0 || max_full_proof_tokens <= 0 ||
      max_history_tokens <= 0 || max_step_tokens <= 0) {
    throw PromptError("all prompt budgets must be positive");
  }
}

const char *KnowledgeSettingName(KnowledgeSetting setting) {
  switch (setting) {
    case KnowledgeSetting::kNone: return "none";
    case KnowledgeSetting::kRetrieved: return "retrieved";
    case KnowledgeSetting::kProvided: return "provided";
  }
  return "none";
}

std::optional<KnowledgeSetting> ParseKnowledgeSetting(std::string_view name) {
  if (name == "none") return KnowledgeSetting::kNone;
  if (name == "retrieved") return KnowledgeSetting::kRetrieved;
  if (name == "provided") return KnowledgeSetting::kProvided;
  return std::nullopt;
}

std::string render_theorem_prompt(const Reference &theorem,
                                  const std::vector<std::string> &ref_titles) {
  std::string content = theorem.content_text();
  std::string out = JoinTokens({"<theorem>", "<title>", theorem.title,
                                "</title>", "<content>", content, "</content>",
                                "</theorem>"});
  for (const std::string &title : ref_titles) {
    out += " " + JoinTokens({"<ref>", title, "</ref>"});
  }
  out += " ";
  out += kProofOpen;
  return out;
}

std::string serialize_steps(const std::vector<std::string> &steps,
                            std::string_view separator) {
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out.append(separator);
    out.append(steps[i]);
  }
  return out;
}

std::string serialize_steps(const std::vector<ProofStep> &steps,
                            std::string_view separator) {
  std::vector<std::string> raw;
  raw.reserve(steps.size());
  for (const ProofStep &step : steps) raw.push_back(step.raw);
  return serialize_steps(raw, separator);
}

FinetuneRecord render_proof_example(const Reference &theorem,
                                    const std::vector<std::string> &ref_titles,
                                    const ProofDocument &proof) {
  FinetuneRecord record;
  record.kind = FinetuneRecord::Kind::kProofExample;
  record.prompt = render_theorem_prompt(theorem, ref_titles);
  record.completion = Slot(serialize_steps(proof.steps)) + " " +
                      std::string(kProofClose);
  return record;
}

FinetuneRecord render_reconstruction(const Reference &reference) {
  std::string type = ReferenceKindName(reference.kind);
  FinetuneRecord record;
  record.kind = FinetuneRecord::Kind::kReconstruction;
  record.prompt = JoinTokens({"<" + type + ">", "<title>", reference.title,
                              "</title>", "<content>"});
  record.completion =
      Slot(reference.content_text()) + " </content> </" + type + ">";
  return record;
}

std::vector<const Reference *> training_references(const Corpus &corpus) {
  std::vector<const Reference *> out;
  for (const Reference &ref : corpus.references()) {
    if (ref.kind == ReferenceKind::kTheorem) {
      auto split = corpus.split_of(ref.id);
      if (split && *split != Split::kTrain) continue;
    }
    out.push_back(&ref);
  }
  return out;
}

std::vector<FinetuneRecord> build_finetune_records(
    const Corpus &corpus, KnowledgeSetting setting,
    const Retrievals *retrievals) {
  std::vector<const Example *> train;
  for (int id : corpus.split(Split::kTrain)) {
    if (const Example *ex = corpus.find_example(id)) train.push_back(ex);
  }

  if (setting == KnowledgeSetting::kRetrieved) {
    std::vector<int> missing;
    for (const Example *ex : train) {
      if (retrievals == nullptr || !retrievals->contains(ex->theorem_id)) {
        missing.push_back(ex->theorem_id);
      }
    }
    if (!missing.empty()) {
      std::string ids;
      for (int id : missing) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
      throw PromptError("retrievals missing for training theorem ids: " + ids);
    }
  }

  std::vector<FinetuneRecord> records;
  for (const Example *ex : train) {
    const Reference &theorem = *corpus.find_by_id(ex->theorem_id);
    std::vector<std::string> titles;
    if (setting == KnowledgeSetting::kProvided) {
      titles = ex->proof.ref_titles;
    } else if (setting == KnowledgeSetting::kRetrieved) {
      const auto &ranked = retrievals->at(ex->theorem_id);
      titles.assign(ranked.begin(),
                    ranked.begin() + std::min(ranked.size(), kRetrievedTitles));
    }
    records.push_back(render_proof_example(theorem, titles, ex->proof));
  }
  if (setting != KnowledgeSetting::kNone) {
    for (const Reference *ref : training_references(corpus)) {
      records.push_back(render_reconstruction(*ref));
    }
  }
  return records;
}

size_t emit_finetune_file(const Corpus &corpus, KnowledgeSetting setting,
                          const Retrievals *retrievals,
                          const std::string &out_path) {
  std::vector<FinetuneRecord> records =
      build_finetune_records(corpus, setting, retrievals);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw PromptError("cannot write '" + out_path + "'");
  for (const FinetuneRecord &record : records) {
    nlohmann::ordered_json line;
    line["prompt"] = record.prompt;
    line["completion"] = record.completion;
    out << line.dump() << '\n';
  }
  if (!out) throw PromptError("write to '" + out_path + "' failed");
  return records.size();
}

std::string render_inference_prompt(
    const Reference &theorem, const std::vector<std::string> &ref_titles,
    const std::optional<std::vector<std::string>> &proof_so_far,
    const PromptBudgets &budgets, const TokenCounter &count_tokens,
    std::string_view separator) {
  budgets.validate();
  const int limit = budgets.max_prompt_tokens;

  std::vector<std::string> titles = ref_titles;
  std::string prompt = render_theorem_prompt(theorem, titles);
  while (count_tokens(prompt) > limit && !titles.empty()) {
    titles.pop_back();
    prompt = render_theorem_prompt(theorem, titles);
  }

  if (count_tokens(prompt) > limit) {
    // Cut the theorem content at word boundaries, keeping the longest prefix
    // that fits.
    std::string content = theorem.content_text();
    std::vector<size_t> cuts{0};
    for (size_t i = 1; i <= content.size(); ++i) {
      bool boundary = i == content.size() ||
                      (content[i] == ' ' || content[i] == '\n' || content[i] == '\t');
      bool prev_word = !(content[i - 1] == ' ' || content[i - 1] == '\n' ||
                         content[i - 1] == '\t');
      if (boundary && prev_word) cuts.push_back(i);
    }
    Reference truncated = theorem;
    auto render_cut = [&](size_t cut) {
      truncated.content = {content.substr(0, cut)};
      if (cut == 0) truncated.content.clear();
      return render_theorem_prompt(truncated, titles);
    };
    if (count_tokens(render_cut(0)) > limit) {
      throw PromptError("theorem '" + theorem.title +
                        "' does not fit the prompt budget of " +
                        std::to_string(limit) + " tokens");
    }
    size_t lo = 0, hi = cuts.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      if (count_tokens(render_cut(cuts[mid])) <= limit) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    prompt = render_cut(cuts[lo]);
  }

  if (proof_so_far && !proof_so_far->empty()) {
    const std::vector<std::string> &steps = *proof_so_far;
    size_t first = 0;
    while (first < steps.size()) {
      std::vector<std::string> tail(steps.begin() + first, steps.end());
      if (count_tokens(serialize_steps(tail, separator)) <=
          budgets.max_history_tokens) {
        break;
      }
      ++first;
    }
    if (first < steps.size()) {
      std::vector<std::string> tail(steps.begin() + first, steps.end());
      prompt += " " + serialize_steps(tail, separator) + std::string(separator);
    }
  }
  return prompt;
}

std::optional<ParsedProofExample> parse_proof_example(std::string_view s) {
  ParsedProofExample out;
  if (!ConsumePrefix(s, "<theorem> <title>")) return std::nullopt;
  auto title = ReadSlot(s, "</title>");
  if (!title || !ConsumePrefix(s, " <content>")) return std::nullopt;
  auto content = ReadSlot(s, "</content>");
  if (!content || !ConsumePrefix(s, " </theorem>")) return std::nullopt;
  out.title = *title;
  out.content = *content;
  while (ConsumePrefix(s, " <ref>")) {
    auto ref = ReadSlot(s, "</ref>");
    if (!ref) return std::nullopt;
    out.ref_titles.push_back(*ref);
  }
  if (!ConsumePrefix(s, " <proof>")) return std::nullopt;
  auto proof = ReadSlot(s, "</proof>");
  if (!proof || !s.empty()) return std::nullopt;
  out.proof = *proof;
  return out;
}

}  // namespace groundproof
