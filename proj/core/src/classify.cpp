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

#include "faultloom/classify.hpp"

#include <atomic>

#include <nlohmann/json.hpp>

#include "faultloom/batch.hpp"
#include "faultloom/error.hpp"
#include "faultloom/llm/repair.hpp"
#include "faultloom/llm/structured.hpp"

namespace faultloom {

using nlohmann::json;

json to_json(const FaultLabel& l) {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  return json{{"issue", l.key.to_string()},
              {"symptom_leaf", opt(l.symptom_leaf)},
              {"root_cause", opt(l.root_cause)},
              {"rationale", l.rationale},
              {"attempts", l.attempts},
              {"valid", l.valid},
              {"raw_output", opt(l.raw_output)},
              {"error", opt(l.error)},
              {"usage", llm::to_json(l.usage)}};
}

FaultLabel fault_label_from_json(const json& doc) {
  try {
    FaultLabel l;
    l.key = IssueKey::parse(doc.at("issue").get<std::string>());
    auto opt_string = [&](const char* field) -> std::optional<std::string> {
      auto it = doc.find(field);
      if (it == doc.end() || it->is_null()) return std::nullopt;
      return it->get<std::string>();
    };
    l.symptom_leaf = opt_string("symptom_leaf");
    l.root_cause = opt_string("root_cause");
    l.rationale = doc.value("rationale", std::string{});
    l.attempts = doc.value("attempts", 0);
    l.valid = doc.at("valid").get<bool>();
    l.raw_output = opt_string("raw_output");
    l.error = opt_string("error");
    if (doc.contains("usage")) l.usage = llm::usage_from_json(doc.at("usage"));
    return l;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("bad fault label: ") + e.what());
  }
}

bool label_is_valid(const FaultLabel& label, const TaxonomyPair& taxonomies) {
  if (!label.symptom_leaf || !label.root_cause) return false;
  const auto* s = taxonomies.symptoms.find(*label.symptom_leaf);
  const auto* r = taxonomies.root_causes.find(*label.root_cause);
  return s != nullptr && r != nullptr && taxonomies.symptoms.is_leaf_granular(*s) &&
         taxonomies.root_causes.is_leaf_granular(*r);
}

namespace {

std::string level_word(int level) {
  switch (level) {
    case 1: return "primary category (level 1)";
    case 2: return "subcategory (level 2)";
    default: return "specific type (level 3)";
  }
}

std::string option_list(const Taxonomy& taxonomy) {
  std::string out;
  for (const auto* n : taxonomy.leaves()) out += "- " + n->name + "\n";
  return out;
}

std::string granularity_instruction(const Taxonomy& taxonomy, const char* what) {
  return std::string("Choose exactly one ") + what + ": the most specific " + level_word(taxonomy.leaf_level()) +
         " that applies (a shallower category is acceptable only where it has no deeper entries). "
         "Use the exact category name from this list:\n" +
         option_list(taxonomy);
}

const TaxonomyNode& resolve_assignable(const Taxonomy& taxonomy, const json& obj, const char* field,
                                       const char* what) {
  const auto& v = obj.at(field);
  if (!v.is_string()) throw Error(ErrorCode::kMissingField, std::string("'") + field + "' must be a category name", field);
  const auto& node = resolve_label(taxonomy, v.get<std::string>());
  if (!taxonomy.is_leaf_granular(node)) {
    throw Error(ErrorCode::kLevelViolation,
                std::string(what) + " '" + node.name + "' is a " + level_word(node.level) +
                    "; answer with one of its most specific entries instead",
                node.id);
  }
  return node;
}

struct Classification {
  std::string symptom_id;
  std::string root_cause_id;
  std::string rationale;
};

}  // namespace

llm::ChatRequest build_classification_prompt(const IssueRecord& issue, const TaxonomyPair& taxonomies,
                                             const llm::LlmHandle& model, const CommentBudget& budget) {
  std::string system =
      "You are an expert in empirical software fault analysis. You classify fault-related issue reports into a "
      "fixed, predefined taxonomy of symptoms and root causes. Never invent categories.";
  std::string user;
  user += "SYMPTOM TAXONOMY (primary categories, subcategories and specific types, with definitions):\n";
  user += render_prompt_section(taxonomies.symptoms);
  user += "\nROOT CAUSE TAXONOMY (primary categories and subcategories, with definitions):\n";
  user += render_prompt_section(taxonomies.root_causes);
  user += "\n" + granularity_instruction(taxonomies.symptoms, "symptom");
  user += "\n" + granularity_instruction(taxonomies.root_causes, "root cause");
  user += "\n--- ISSUE ---\n" + render_issue(issue, budget) + "--- END ISSUE ---\n";
  user +=
      "\nReply with a single JSON object:\n"
      "{\"symptom\": \"<exact symptom name>\", \"root_cause\": \"<exact root cause name>\", "
      "\"rationale\": \"<one or two sentences>\"}\n";
  return model.make_request(std::move(system), std::move(user));
}

FaultLabel classify(const IssueRecord& issue, const TaxonomyPair& taxonomies, const llm::LlmHandle& model,
                    const CommentBudget& budget) {
  FaultLabel label;
  label.key = issue.key();
  if (model.client == nullptr) throw Error(ErrorCode::kInvalidArgument, "no chat client", label.key.to_string());

  auto interpret = [&](const std::string& raw) {
    auto obj = llm::extract_structured(raw, {"symptom", "root_cause"});
    Classification c;
    c.symptom_id = resolve_assignable(taxonomies.symptoms, obj, "symptom", "symptom").id;
    c.root_cause_id = resolve_assignable(taxonomies.root_causes, obj, "root_cause", "root cause").id;
    if (auto r = obj.find("rationale"); r != obj.end() && r->is_string()) c.rationale = r->get<std::string>();
    return c;
  };

  try {
    auto outcome = llm::complete_with_repair(*model.client, build_classification_prompt(issue, taxonomies, model, budget),
                                             llm::kDefaultRepairBudget, interpret);
    label.attempts = outcome.attempts;
    label.usage = outcome.usage;
    if (outcome.value) {
      label.symptom_leaf = outcome.value->symptom_id;
      label.root_cause = outcome.value->root_cause_id;
      label.rationale = outcome.value->rationale;
      label.valid = true;
    } else {
      label.raw_output = outcome.last_raw;
      label.rationale = outcome.last_error;
    }
  } catch (const Error& e) {
    throw Error(e.code(), label.key.to_string() + ": " + e.what(), label.key.to_string());
  }
  return label;
}

std::vector<FaultLabel> run_stage3(const std::vector<IssueRecord>& issues, const TaxonomyPair& taxonomies,
                                   const llm::LlmHandle& model, int parallelism, const CommentBudget& budget,
                                   const ProgressFn& progress) {
  std::atomic<std::size_t> done{0};
  return parallel_map(issues.size(), parallelism, [&](std::size_t i) {
    FaultLabel label;
    try {
      label = classify(issues[i], taxonomies, model, budget);
    } catch (const Error& e) {
      label = FaultLabel{};
      label.key = issues[i].key();
      label.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    if (progress) progress(++done, issues.size());
    return label;
  });
}

}  // namespace faultloom
