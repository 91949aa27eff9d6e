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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "faultloom/llm/chat.hpp"
#include "faultloom/rational.hpp"

namespace faultloom {

struct StudyTheme {
  std::string description;
  std::vector<std::string> constraints;
};

struct ProposedProject {
  std::string name;
  std::optional<std::string> url;
  std::string rationale;
};

struct StudyPlan {
  std::vector<ProposedProject> projects;
  std::vector<std::string> research_questions;
};

// How project names are compared. Defaults: case-fold, drop a trailing ".js"
// or "js", then drop punctuation and whitespace ("Tensorflow JS" and
// "TensorFlow.js" both become "tensorflow").
struct NameNormalization {
  bool case_fold = true;
  bool strip_punctuation = true;
  std::vector<std::string> suffixes{".js", "js"};

  std::string apply(std::string_view name) const;
};

nlohmann::json to_json(const StudyPlan& plan);
nlohmann::json to_json(const NameNormalization& rules);
NameNormalization name_normalization_from_json(const nlohmann::json& doc);

llm::ChatRequest build_definition_prompt(const StudyTheme& theme, const llm::LlmHandle& model);

// Parses a plan from raw model output; duplicate projects (after
// normalization) keep their first occurrence. Throws on malformed structure.
StudyPlan parse_study_plan(std::string_view raw, const NameNormalization& rules);

struct ProposalResult {
  StudyPlan plan;
  int attempts = 0;
  llm::Usage usage;
};

// Elicits a plan; up to two repair round-trips on unusable output, after
// which Error(kNoStructuredObject) is thrown. A plan without projects or
// research questions is Error(kEmptyPlan).
ProposalResult propose_study(const StudyTheme& theme, const llm::LlmHandle& model,
                             const NameNormalization& rules = {});

struct PlanScore {
  Ratio recall;
  std::vector<std::string> hits;    // reference names found in the plan
  std::vector<std::string> misses;  // reference names absent from the plan
  std::vector<std::string> extras;  // plan names absent from the reference
};

PlanScore score_plan(const StudyPlan& plan, const std::vector<std::string>& reference,
                     const NameNormalization& rules = {});

nlohmann::json to_json(const PlanScore& score);

// One name per line; blank lines and '#' comments ignored.
std::vector<std::string> load_reference_list(const std::filesystem::path& path);

}  // namespace faultloom
