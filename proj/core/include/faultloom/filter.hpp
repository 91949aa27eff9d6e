// Copyright 2026 The FaultLoom Authors.
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

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "faultloom/corpus.hpp"
#include "faultloom/llm/chat.hpp"
#include "faultloom/time.hpp"

namespace faultloom {

struct CommentBudget {
  std::size_t max_comments = 20;
  std::size_t max_chars = 8000;  // summed over included comment bodies
  std::size_t max_body_chars = 8000;
};

struct SemanticCriterion {
  std::string name;
  std::string text;
};

// The two judgement-based criteria handed to the model.
std::vector<SemanticCriterion> default_semantic_criteria();

struct FilterCriteria {
  std::vector<std::string> vocabulary;
  std::vector<std::string> exclusion_labels;
  Date cutoff_date{};
  bool require_answered = true;
  CommentBudget budget;
  std::vector<SemanticCriterion> semantic = default_semantic_criteria();
};

// Criteria file: {"exclusion_labels": [...], "cutoff_date": "YYYY-MM-DD",
// "require_answered": bool, "comment_budget": {...}, "semantic_criteria": [...]}.
// The vocabulary comes from a separate one-term-per-line file.
FilterCriteria load_filter_criteria(const nlohmann::json& doc, std::vector<std::string> vocabulary);
nlohmann::json to_json(const FilterCriteria& criteria);
void validate(const FilterCriteria& criteria);

enum class CriterionId { kVocabulary, kExclusionLabel, kCutoffDate, kAnswered };
std::string_view to_string(CriterionId id);

struct CriterionResult {
  CriterionId id;
  bool passed = false;
  std::string evidence;

  bool operator==(const CriterionResult&) const = default;
};

using CriterionTrace = std::vector<CriterionResult>;

// Case-insensitive whole-word vocabulary lookup. A term matches where it
// occurs with a non-alphanumeric character (or the text edge) on both sides;
// plain alphanumeric terms go through a token hash, terms with punctuation
// or spaces ("tf.js", "out of memory") through a bounded substring search.
class VocabularyMatcher {
 public:
  explicit VocabularyMatcher(const std::vector<std::string>& vocabulary);

  // The earliest vocabulary term (in vocabulary order) found in any text.
  std::optional<std::string> first_match(const std::vector<std::string_view>& texts) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> token_terms_;
  std::vector<std::pair<std::string, std::size_t>> phrase_terms_;  // lowered, index
};

// Evaluates, in order: vocabulary hit (title, body, comments), no exclusion
// label, created on/after the cutoff date, and (if required) at least one
// comment.
CriterionTrace apply_deterministic(const IssueRecord& issue, const FilterCriteria& criteria);
CriterionTrace apply_deterministic(const IssueRecord& issue, const FilterCriteria& criteria,
                                   const VocabularyMatcher& matcher);

// Renders the issue section shared by the Stage II and Stage III prompts.
std::string render_issue(const IssueRecord& issue, const CommentBudget& budget);

llm::ChatRequest build_filter_prompt(const IssueRecord& issue, const FilterCriteria& criteria,
                                     const llm::LlmHandle& model);

struct FilterDecision {
  IssueKey key;
  CriterionTrace trace;
  std::optional<bool> llm_verdict;
  std::optional<std::string> llm_rationale;
  bool final = false;
  int attempts = 0;
  bool parse_failure = false;
  std::optional<std::string> raw_output;  // kept when parsing failed
  std::optional<std::string> error;       // per-issue failure in a batch
  llm::Usage usage;

  bool deterministic_passed() const;
};

nlohmann::json to_json(const FilterDecision& decision);
FilterDecision filter_decision_from_json(const nlohmann::json& doc);

// Deterministic criteria first; only if all pass is the model consulted.
// Unusable replies get up to two repair round-trips, then final=false with
// parse_failure set. Provider errors are rethrown with the issue key as subject.
FilterDecision judge(const IssueRecord& issue, const FilterCriteria& criteria, const llm::LlmHandle& model);
FilterDecision judge(const IssueRecord& issue, const FilterCriteria& criteria, const llm::LlmHandle& model,
                     const VocabularyMatcher& matcher);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// One decision per record in corpus order. Per-issue failures are recorded
// in FilterDecision::error and never abort the batch.
std::vector<FilterDecision> run_stage2(const Corpus& corpus, const FilterCriteria& criteria,
                                       const llm::LlmHandle& model, int parallelism, const ProgressFn& progress = {});

}  // namespace faultloom
