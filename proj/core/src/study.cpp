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

#include "faultloom/study.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"
#include "faultloom/llm/repair.hpp"
#include "faultloom/llm/structured.hpp"
#include "faultloom/text.hpp"

namespace faultloom {

using nlohmann::json;

std::string NameNormalization::apply(std::string_view name) const {
  std::string s = text::collapse_whitespace(name);
  if (case_fold) s = text::lower(s);
  for (const auto& suffix : suffixes) {
    if (s.size() > suffix.size() && text::iequals(std::string_view(s).substr(s.size() - suffix.size()), suffix)) {
      s.resize(s.size() - suffix.size());
      break;
    }
  }
  if (strip_punctuation) {
    std::string kept;
    for (char c : s) {
      if (text::is_alnum(c) || static_cast<unsigned char>(c) >= 0x80) kept.push_back(c);
    }
    s = std::move(kept);
  }
  return s;
}

json to_json(const StudyPlan& plan) {
  json projects = json::array();
  for (const auto& p : plan.projects) {
    projects.push_back({{"name", p.name}, {"url", p.url ? json(*p.url) : json(nullptr)}, {"rationale", p.rationale}});
  }
  return json{{"projects", std::move(projects)}, {"research_questions", plan.research_questions}};
}

json to_json(const NameNormalization& rules) {
  return json{{"case_fold", rules.case_fold}, {"strip_punctuation", rules.strip_punctuation}, {"suffixes", rules.suffixes}};
}

NameNormalization name_normalization_from_json(const json& doc) {
  NameNormalization rules;
  rules.case_fold = doc.value("case_fold", rules.case_fold);
  rules.strip_punctuation = doc.value("strip_punctuation", rules.strip_punctuation);
  if (doc.contains("suffixes")) rules.suffixes = doc.at("suffixes").get<std::vector<std::string>>();
  return rules;
}

llm::ChatRequest build_definition_prompt(const StudyTheme& theme, const llm::LlmHandle& model) {
  if (text::trim(theme.description).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "study theme description must be non-empty");
  }
  std::string system =
      "You are a software engineering researcher planning an empirical study of software faults. "
      "You select representative open-source projects to mine and formulate research questions.";
  std::string user = "Research theme: " + theme.description + "\n";
  if (!theme.constraints.empty()) {
    user += "\nConstraints:\n";
    for (const auto& c : theme.constraints) user += "- " + c + "\n";
  }
  user +=
      "\nTasks:\n"
      "1. Select the open-source projects that are representative for this theme.\n"
      "2. Formulate the research questions the study should answer.\n"
      "\nReply with a single JSON object of the form:\n"
      "{\"projects\": [{\"name\": \"...\", \"url\": \"...\", \"rationale\": \"...\"}], "
      "\"research_questions\": [\"...\"]}\n";
  return model.make_request(std::move(system), std::move(user));
}

StudyPlan parse_study_plan(std::string_view raw, const NameNormalization& rules) {
  auto obj = llm::extract_structured(raw, {"projects", "research_questions"});
  const auto& projects = obj.at("projects");
  const auto& questions = obj.at("research_questions");
  if (!projects.is_array()) throw Error(ErrorCode::kMalformedDocument, "'projects' must be a list");
  if (!questions.is_array()) throw Error(ErrorCode::kMalformedDocument, "'research_questions' must be a list");

  StudyPlan plan;
  std::set<std::string> seen;
  for (const auto& p : projects) {
    ProposedProject project;
    if (p.is_string()) {
      project.name = p.get<std::string>();
    } else if (p.is_object() && p.contains("name") && p.at("name").is_string()) {
      project.name = p.at("name").get<std::string>();
      if (auto u = p.find("url"); u != p.end() && u->is_string()) project.url = u->get<std::string>();
      if (auto r = p.find("rationale"); r != p.end() && r->is_string()) project.rationale = r->get<std::string>();
    } else {
      throw Error(ErrorCode::kMalformedDocument, "each project needs a string 'name'");
    }
    project.name = text::collapse_whitespace(project.name);
    auto key = rules.apply(project.name);
    if (key.empty() || !seen.insert(key).second) continue;
    plan.projects.push_back(std::move(project));
  }
  for (const auto& q : questions) {
    if (!q.is_string()) throw Error(ErrorCode::kMalformedDocument, "research questions must be strings");
    auto s = text::collapse_whitespace(q.get<std::string>());
    if (!s.empty()) plan.research_questions.push_back(std::move(s));
  }
  return plan;
}

ProposalResult propose_study(const StudyTheme& theme, const llm::LlmHandle& model, const NameNormalization& rules) {
  if (model.client == nullptr) throw Error(ErrorCode::kInvalidArgument, "no chat client");
  auto request = build_definition_prompt(theme, model);
  auto outcome = llm::complete_with_repair(*model.client, request, llm::kDefaultRepairBudget,
                                           [&](const std::string& raw) { return parse_study_plan(raw, rules); });
  if (!outcome.value) {
    throw Error(ErrorCode::kNoStructuredObject,
                "no usable study plan after " + std::to_string(outcome.attempts) + " attempts: " + outcome.last_error);
  }
  if (outcome.value->projects.empty() || outcome.value->research_questions.empty()) {
    throw Error(ErrorCode::kEmptyPlan, "model proposed no projects or no research questions");
  }
  return {std::move(*outcome.value), outcome.attempts, outcome.usage};
}

PlanScore score_plan(const StudyPlan& plan, const std::vector<std::string>& reference, const NameNormalization& rules) {
  if (reference.empty()) throw Error(ErrorCode::kEmptyReference, "reference project list is empty");

  std::set<std::string> planned;
  for (const auto& p : plan.projects) planned.insert(rules.apply(p.name));

  PlanScore score;
  std::set<std::string> reference_keys;
  for (const auto& name : reference) {
    auto key = rules.apply(name);
    if (!reference_keys.insert(key).second) continue;
    (planned.count(key) != 0 ? score.hits : score.misses).push_back(name);
  }
  for (const auto& p : plan.projects) {
    if (reference_keys.count(rules.apply(p.name)) == 0) score.extras.push_back(p.name);
  }
  score.recall = Ratio(static_cast<std::int64_t>(score.hits.size()), static_cast<std::int64_t>(reference_keys.size()));
  return score;
}

json to_json(const PlanScore& s) {
  return json{{"recall", to_json(s.recall)}, {"hits", s.hits}, {"misses", s.misses}, {"extras", s.extras}};
}

std::vector<std::string> load_reference_list(const std::filesystem::path& path) {
  return text::read_list_file(path);
}

}  // namespace faultloom
