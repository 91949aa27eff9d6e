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

#include "faultloom/filter.hpp"

#include <atomic>

#include <nlohmann/json.hpp>

#include "faultloom/batch.hpp"
#include "faultloom/error.hpp"
#include "faultloom/llm/repair.hpp"
#include "faultloom/llm/structured.hpp"
#include "faultloom/text.hpp"

namespace faultloom {

using nlohmann::json;

std::vector<SemanticCriterion> default_semantic_criteria() {
  return {
      {"Actual Fault Reporting",
       "Issues must describe observable problems, errors, or system failures rather than feature requests, "
       "general questions, or theoretical discussions."},
      {"Technical Clarity",
       "Issues must provide sufficient technical detail and clear problem descriptions that enable fault "
       "analysis and understanding."},
  };
}

void validate(const FilterCriteria& c) {
  if (c.vocabulary.empty()) throw Error(ErrorCode::kConfig, "filter vocabulary is empty");
  if (c.budget.max_comments == 0 && c.budget.max_chars > 0) {
    // allowed: comments are simply never shown
  }
}

FilterCriteria load_filter_criteria(const json& doc, std::vector<std::string> vocabulary) {
  FilterCriteria c;
  c.vocabulary = std::move(vocabulary);
  try {
    c.exclusion_labels = doc.value("exclusion_labels", std::vector<std::string>{});
    c.cutoff_date = parse_date(doc.at("cutoff_date").get<std::string>());
    c.require_answered = doc.value("require_answered", true);
    if (auto b = doc.find("comment_budget"); b != doc.end()) {
      c.budget.max_comments = b->value("max_comments", c.budget.max_comments);
      c.budget.max_chars = b->value("max_chars", c.budget.max_chars);
      c.budget.max_body_chars = b->value("max_body_chars", c.budget.max_body_chars);
    }
    if (auto s = doc.find("semantic_criteria"); s != doc.end()) {
      c.semantic.clear();
      for (const auto& item : *s) c.semantic.push_back({item.at("name").get<std::string>(), item.at("text").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad criteria document: ") + e.what());
  }
  validate(c);
  return c;
}

json to_json(const FilterCriteria& c) {
  json semantic = json::array();
  for (const auto& s : c.semantic) semantic.push_back({{"name", s.name}, {"text", s.text}});
  return json{{"vocabulary", c.vocabulary},
              {"exclusion_labels", c.exclusion_labels},
              {"cutoff_date", format_date(c.cutoff_date)},
              {"require_answered", c.require_answered},
              {"comment_budget",
               {{"max_comments", c.budget.max_comments},
                {"max_chars", c.budget.max_chars},
                {"max_body_chars", c.budget.max_body_chars}}},
              {"semantic_criteria", std::move(semantic)}};
}

std::string_view to_string(CriterionId id) {
  switch (id) {
    case CriterionId::kVocabulary: return "vocabulary";
    case CriterionId::kExclusionLabel: return "exclusion_label";
    case CriterionId::kCutoffDate: return "cutoff_date";
    case CriterionId::kAnswered: return "answered";
  }
  return "unknown";
}

namespace {

CriterionId criterion_from_string(std::string_view s) {
  for (auto id : {CriterionId::kVocabulary, CriterionId::kExclusionLabel, CriterionId::kCutoffDate,
                  CriterionId::kAnswered}) {
    if (to_string(id) == s) return id;
  }
  throw Error(ErrorCode::kMalformedRecord, "unknown criterion '" + std::string(s) + "'");
}

bool bounded_at(std::string_view haystack, std::size_t pos, std::size_t len) {
  bool left = pos == 0 || !text::is_alnum(haystack[pos - 1]);
  bool right = pos + len == haystack.size() || !text::is_alnum(haystack[pos + len]);
  return left && right;
}

}  // namespace

VocabularyMatcher::VocabularyMatcher(const std::vector<std::string>& vocabulary) {
  for (const auto& raw : vocabulary) {
    auto term = std::string(text::trim(raw));
    if (term.empty()) continue;
    const auto index = terms_.size();
    terms_.push_back(term);
    auto lowered = text::lower(term);
    bool plain = std::all_of(lowered.begin(), lowered.end(), text::is_alnum);
    if (plain) {
      token_terms_.emplace(lowered, index);  // keeps the first index on duplicates
    } else {
      phrase_terms_.emplace_back(std::move(lowered), index);
    }
  }
}

std::optional<std::string> VocabularyMatcher::first_match(const std::vector<std::string_view>& texts) const {
  std::size_t best = terms_.size();
  for (auto t : texts) {
    std::string lowered = text::lower(t);
    std::size_t i = 0;
    while (i < lowered.size() && best > 0) {
      while (i < lowered.size() && !text::is_alnum(lowered[i])) ++i;
      std::size_t start = i;
      while (i < lowered.size() && text::is_alnum(lowered[i])) ++i;
      if (i > start) {
        auto it = token_terms_.find(lowered.substr(start, i - start));
        if (it != token_terms_.end() && it->second < best) best = it->second;
      }
    }
    for (const auto& [phrase, index] : phrase_terms_) {
      if (index >= best) continue;
      for (auto pos = lowered.find(phrase); pos != std::string::npos; pos = lowered.find(phrase, pos + 1)) {
        if (bounded_at(lowered, pos, phrase.size())) {
          best = index;
          break;
        }
      }
    }
  }
  if (best == terms_.size()) return std::nullopt;
  return terms_[best];
}

CriterionTrace apply_deterministic(const IssueRecord& issue, const FilterCriteria& criteria) {
  return apply_deterministic(issue, criteria, VocabularyMatcher(criteria.vocabulary));
}

CriterionTrace apply_deterministic(const IssueRecord& issue, const FilterCriteria& criteria,
                                   const VocabularyMatcher& matcher) {
  CriterionTrace trace;

  std::vector<std::string_view> texts{issue.title, issue.body};
  for (const auto& c : issue.comments) texts.push_back(c.body);
  auto hit = matcher.first_match(texts);
  trace.push_back({CriterionId::kVocabulary, hit.has_value(), hit.value_or("no vocabulary term found")});

  std::optional<std::string> excluded;
  for (const auto& label : issue.labels) {
    for (const auto& banned : criteria.exclusion_labels) {
      if (text::iequals(text::trim(label), text::trim(banned))) {
        excluded = label;
        break;
      }
    }
    if (excluded) break;
  }
  trace.push_back({CriterionId::kExclusionLabel, !excluded, excluded.value_or("no exclusion label")});

  auto created = date_of(issue.created_at);
  trace.push_back({CriterionId::kCutoffDate, created >= criteria.cutoff_date, format_date(created)});

  if (criteria.require_answered) {
    trace.push_back({CriterionId::kAnswered, !issue.comments.empty(),
                     std::to_string(issue.comments.size()) + " comment(s)"});
  }
  return trace;
}

std::string render_issue(const IssueRecord& issue, const CommentBudget& budget) {
  std::string out;
  out += "Issue: " + issue.key().to_string() + "\n";
  out += "Title: " + issue.title + "\n";
  out += "State: " + std::string(issue.state == IssueState::kClosed ? "closed" : "open") + "\n";
  out += "Created: " + format_rfc3339(issue.created_at) + "\n";
  out += "Labels: ";
  if (issue.labels.empty()) {
    out += "(none)";
  } else {
    for (std::size_t i = 0; i < issue.labels.size(); ++i) out += (i ? ", " : "") + issue.labels[i];
  }
  out += "\nBody:\n";
  if (text::trim(issue.body).empty()) {
    out += "(empty body)\n";
  } else if (issue.body.size() > budget.max_body_chars) {
    out += issue.body.substr(0, budget.max_body_chars) + "\n[... body truncated ...]\n";
  } else {
    out += issue.body + "\n";
  }

  const auto total = issue.comments.size();
  if (total == 0) {
    out += "Comments: (none)\n";
    return out;
  }
  std::string shown;
  std::size_t included = 0, chars = 0;
  for (const auto& c : issue.comments) {
    if (included == budget.max_comments || chars >= budget.max_chars) break;
    auto body = c.body;
    bool cut = false;
    if (chars + body.size() > budget.max_chars) {
      body.resize(budget.max_chars - chars);
      cut = true;
    }
    chars += body.size();
    ++included;
    shown += "[" + std::to_string(included) + "] (" + (c.author_role.empty() ? "unknown" : c.author_role) + ", " +
             format_rfc3339(c.created_at) + ")\n" + body + (cut ? " [... comment truncated ...]" : "") + "\n";
  }
  out += "Comments (" + std::to_string(included) + " of " + std::to_string(total) + " shown):\n" + shown;
  if (included < total) {
    out += "[... " + std::to_string(total - included) + " more comment(s) omitted ...]\n";
  }
  return out;
}

llm::ChatRequest build_filter_prompt(const IssueRecord& issue, const FilterCriteria& criteria,
                                     const llm::LlmHandle& model) {
  std::string system =
      "You are an expert in empirical software fault analysis. You read issue reports from an issue tracker "
      "and decide whether each one is fault-related (eligible for further fault analysis) or non-fault. "
      "Judge only from the text and metadata given; no source code is available.";
  std::string user = "An issue is fault-related only if it satisfies every criterion below.\n";
  for (std::size_t i = 0; i < criteria.semantic.size(); ++i) {
    user += std::to_string(i + 1) + ". " + criteria.semantic[i].name + ": " + criteria.semantic[i].text + "\n";
  }
  user += "\n--- ISSUE ---\n" + render_issue(issue, criteria.budget) + "--- END ISSUE ---\n";
  user +=
      "\nReply with a single JSON object:\n"
      "{\"fault_related\": true or false, \"rationale\": \"<one or two sentences>\"}\n";
  return model.make_request(std::move(system), std::move(user));
}

bool FilterDecision::deterministic_passed() const {
  return std::all_of(trace.begin(), trace.end(), [](const CriterionResult& r) { return r.passed; });
}

json to_json(const FilterDecision& d) {
  json trace = json::array();
  for (const auto& t : d.trace) trace.push_back({{"criterion", to_string(t.id)}, {"passed", t.passed}, {"evidence", t.evidence}});
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  return json{{"issue", d.key.to_string()},
              {"trace", std::move(trace)},
              {"llm_verdict", opt(d.llm_verdict)},
              {"llm_rationale", opt(d.llm_rationale)},
              {"final", d.final},
              {"attempts", d.attempts},
              {"parse_failure", d.parse_failure},
              {"raw_output", opt(d.raw_output)},
              {"error", opt(d.error)},
              {"usage", llm::to_json(d.usage)}};
}

FilterDecision filter_decision_from_json(const json& doc) {
  try {
    FilterDecision d;
    d.key = IssueKey::parse(doc.at("issue").get<std::string>());
    for (const auto& t : doc.at("trace")) {
      d.trace.push_back({criterion_from_string(t.at("criterion").get<std::string>()), t.at("passed").get<bool>(),
                         t.at("evidence").get<std::string>()});
    }
    if (!doc.at("llm_verdict").is_null()) d.llm_verdict = doc.at("llm_verdict").get<bool>();
    if (!doc.at("llm_rationale").is_null()) d.llm_rationale = doc.at("llm_rationale").get<std::string>();
    d.final = doc.at("final").get<bool>();
    d.attempts = doc.value("attempts", 0);
    d.parse_failure = doc.value("parse_failure", false);
    if (doc.contains("raw_output") && !doc.at("raw_output").is_null()) d.raw_output = doc.at("raw_output").get<std::string>();
    if (doc.contains("error") && !doc.at("error").is_null()) d.error = doc.at("error").get<std::string>();
    if (doc.contains("usage")) d.usage = llm::usage_from_json(doc.at("usage"));
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("bad filter decision: ") + e.what());
  }
}

namespace {

struct Verdict {
  bool fault_related;
  std::optional<std::string> rationale;
};

Verdict parse_verdict(const std::string& raw) {
  auto obj = llm::extract_structured(raw, {"fault_related"});
  const auto& v = obj.at("fault_related");
  Verdict verdict{};
  if (v.is_boolean()) {
    verdict.fault_related = v.get<bool>();
  } else if (v.is_string() && (text::iequals(v.get<std::string>(), "true") || text::iequals(v.get<std::string>(), "false"))) {
    verdict.fault_related = text::iequals(v.get<std::string>(), "true");
  } else {
    throw Error(ErrorCode::kMissingField, "'fault_related' must be true or false", "fault_related");
  }
  if (auto r = obj.find("rationale"); r != obj.end() && r->is_string()) verdict.rationale = r->get<std::string>();
  return verdict;
}

}  // namespace

FilterDecision judge(const IssueRecord& issue, const FilterCriteria& criteria, const llm::LlmHandle& model) {
  return judge(issue, criteria, model, VocabularyMatcher(criteria.vocabulary));
}

FilterDecision judge(const IssueRecord& issue, const FilterCriteria& criteria, const llm::LlmHandle& model,
                     const VocabularyMatcher& matcher) {
  FilterDecision decision;
  decision.key = issue.key();
  decision.trace = apply_deterministic(issue, criteria, matcher);
  if (!decision.deterministic_passed()) return decision;

  if (model.client == nullptr) throw Error(ErrorCode::kInvalidArgument, "no chat client", decision.key.to_string());
  try {
    auto outcome = llm::complete_with_repair(*model.client, build_filter_prompt(issue, criteria, model),
                                             llm::kDefaultRepairBudget, parse_verdict);
    decision.attempts = outcome.attempts;
    decision.usage = outcome.usage;
    if (outcome.value) {
      decision.llm_verdict = outcome.value->fault_related;
      decision.llm_rationale = outcome.value->rationale;
      decision.final = outcome.value->fault_related;
    } else {
      decision.parse_failure = true;
      decision.raw_output = outcome.last_raw;
    }
  } catch (const Error& e) {
    throw Error(e.code(), decision.key.to_string() + ": " + e.what(), decision.key.to_string());
  }
  return decision;
}

std::vector<FilterDecision> run_stage2(const Corpus& corpus, const FilterCriteria& criteria,
                                       const llm::LlmHandle& model, int parallelism, const ProgressFn& progress) {
  const VocabularyMatcher matcher(criteria.vocabulary);
  const auto& records = corpus.records();
  std::atomic<std::size_t> done{0};
  return parallel_map(records.size(), parallelism, [&](std::size_t i) {
    FilterDecision decision;
    try {
      decision = judge(records[i], criteria, model, matcher);
    } catch (const Error& e) {
      decision = FilterDecision{};
      decision.key = records[i].key();
      decision.trace = apply_deterministic(records[i], criteria, matcher);
      decision.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    if (progress) progress(++done, records.size());
    return decision;
  });
}

}  // namespace faultloom
