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

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "faultloom/corpus.hpp"
#include "faultloom/filter.hpp"
#include "faultloom/llm/chat.hpp"
#include "faultloom/taxonomy.hpp"

namespace faultloom {

struct TaxonomyPair {
  Taxonomy symptoms;
  Taxonomy root_causes;
};

struct FaultLabel {
  IssueKey key;
  std::optional<std::string> symptom_leaf;  // node id
  std::optional<std::string> root_cause;    // node id
  std::string rationale;
  int attempts = 0;
  bool valid = false;
  std::optional<std::string> raw_output;  // final model output when invalid
  std::optional<std::string> error;       // provider failure in a batch
  llm::Usage usage;
};

nlohmann::json to_json(const FaultLabel& label);
FaultLabel fault_label_from_json(const nlohmann::json& doc);

// True when both ids are present and each names a leaf-granularity node of
// its taxonomy.
bool label_is_valid(const FaultLabel& label, const TaxonomyPair& taxonomies);

llm::ChatRequest build_classification_prompt(const IssueRecord& issue, const TaxonomyPair& taxonomies,
                                             const llm::LlmHandle& model, const CommentBudget& budget = {});

// Asks for one symptom and one root cause by exact category name. Each name
// is resolved against its taxonomy and must be at leaf granularity; on any
// failure the specific problem is sent back, at most twice. After that the
// label is returned with valid=false and the last raw output. Provider errors
// are rethrown with the issue key as subject.
FaultLabel classify(const IssueRecord& issue, const TaxonomyPair& taxonomies, const llm::LlmHandle& model,
                    const CommentBudget& budget = {});

// Order-preserving batch; per-issue failures are recorded in FaultLabel::error.
std::vector<FaultLabel> run_stage3(const std::vector<IssueRecord>& issues, const TaxonomyPair& taxonomies,
                                   const llm::LlmHandle& model, int parallelism, const CommentBudget& budget = {},
                                   const ProgressFn& progress = {});

}  // namespace faultloom
