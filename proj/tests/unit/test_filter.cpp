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

#include <doctest.h>

#include <algorithm>
#include <chrono>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"
#include "faultloom/filter.hpp"
#include "support/support.hpp"

using namespace faultloom;
using faultloom::testing::make_issue;

namespace {

FilterCriteria criteria() {
  FilterCriteria c;
  c.vocabulary = {"crash", "out of memory", "tf.js"};
  c.exclusion_labels = {"type:feature"};
  c.cutoff_date = parse_date("2018-03-01");
  return c;
}

const std::string kYes = R"({"fault_related": true, "rationale": "It crashes."})";

}  // namespace

TEST_CASE("criteria documents") {
  auto c = load_filter_criteria(nlohmann::json::parse(R"({"cutoff_date":"2019-01-01","exclusion_labels":["x"],
      "comment_budget":{"max_comments":3},"semantic_criteria":[{"name":"A","text":"a"}]})"),
                                {"bug"});
  CHECK(c.cutoff_date == parse_date("2019-01-01"));
  CHECK(c.budget.max_comments == 3);
  CHECK(c.budget.max_chars == 8000);
  CHECK(c.semantic.size() == 1);
  CHECK(c.require_answered);
  CHECK_THROWS_AS(load_filter_criteria(nlohmann::json::parse("{}"), {"bug"}), Error);
  CHECK_THROWS_AS(load_filter_criteria(nlohmann::json::parse(R"({"cutoff_date":"2019-01-01"})"), {}), Error);
  CHECK(default_semantic_criteria().size() == 2);
}

TEST_CASE("vocabulary matching respects word boundaries") {
  VocabularyMatcher m({"crash", "out of memory", "tf.js", "404"});
  auto hit = [&](std::string_view t) { return m.first_match({t}); };
  CHECK(hit("App CRASHED") == std::nullopt);
  CHECK(hit("a crash.") == "crash");
  CHECK(hit("xcrash") == std::nullopt);
  CHECK(hit("Out  of memory") == std::nullopt);
  CHECK(hit("ran out of memory!") == "out of memory");
  CHECK(hit("@tensorflow/tf.js") == "tf.js");
  CHECK(hit("tf.jsx") == std::nullopt);
  CHECK(hit("HTTP 404") == "404");
  CHECK(hit("4040") == std::nullopt);
  // earliest term in vocabulary order wins, whatever the position in the text
  CHECK(m.first_match({"tf.js then crash"}) == "crash");
  CHECK(m.first_match({"tf.js", "later a crash"}) == "crash");
}

TEST_CASE("deterministic criteria agree with the naive oracle on 500 random issues") {
  auto scenario = testing::random_filter_scenario(500, 424242);
  CHECK(testing::first_filter_disagreement(scenario) == "");
  int passing = 0;
  for (const auto& i : scenario.issues) {
    auto t = apply_deterministic(i, scenario.criteria);
    passing += std::all_of(t.begin(), t.end(), [](const CriterionResult& r) { return r.passed; });
  }
  // the generator should exercise both outcomes
  CHECK(passing > 20);
  CHECK(passing < 480);
}

TEST_CASE("trace order and evidence") {
  auto issue = make_issue("o/r", 1, "Crash on load", "", "2018-02-28T23:59:59Z", 0, {"Type:Feature"});
  auto t = apply_deterministic(issue, criteria());
  REQUIRE(t.size() == 4);
  CHECK(t[0] == CriterionResult{CriterionId::kVocabulary, true, "crash"});
  CHECK(t[1] == CriterionResult{CriterionId::kExclusionLabel, false, "Type:Feature"});
  CHECK(t[2] == CriterionResult{CriterionId::kCutoffDate, false, "2018-02-28"});
  CHECK(t[3] == CriterionResult{CriterionId::kAnswered, false, "0 comment(s)"});
  auto c = criteria();
  c.require_answered = false;
  CHECK(apply_deterministic(issue, c).size() == 3);
  issue.created_at = parse_rfc3339("2018-03-01T00:00:00Z");
  issue.updated_at = issue.created_at;
  CHECK(apply_deterministic(issue, c)[2].passed);
}

TEST_CASE("a failed deterministic criterion skips the model") {
  testing::FunctionClient client([](const llm::ChatRequest&) { return kYes; });
  llm::LlmHandle h{&client, "openai/gpt-4o", 256};
  auto d = judge(make_issue("o/r", 1, "Feature idea", "please add"), criteria(), h);
  CHECK_FALSE(d.final);
  CHECK_FALSE(d.llm_verdict.has_value());
  CHECK(d.attempts == 0);
  CHECK(client.calls() == 0);
}

TEST_CASE("model verdicts") {
  int n = 0;
  testing::FunctionClient client([&](const llm::ChatRequest& r) {
    ++n;
    if (r.user_text.find("Issue: o/r#2\n") != std::string::npos) return std::string(R"({"fault_related": "FALSE"})");
    if (r.user_text.find("Issue: o/r#3\n") != std::string::npos) return std::string("It is probably a bug.");
    return kYes;
  });
  llm::LlmHandle h{&client, "openai/gpt-4o", 256};
  auto yes = judge(make_issue("o/r", 1, "crash", "b"), criteria(), h);
  CHECK(yes.final);
  CHECK(yes.llm_rationale == "It crashes.");
  CHECK(yes.attempts == 1);
  CHECK(yes.usage.calls == 1);

  auto no = judge(make_issue("o/r", 2, "crash", "b"), criteria(), h);
  CHECK_FALSE(no.final);
  CHECK(no.llm_verdict == false);

  auto bad = judge(make_issue("o/r", 3, "crash", "b"), criteria(), h);
  CHECK_FALSE(bad.final);
  CHECK(bad.parse_failure);
  CHECK(bad.attempts == 3);
  CHECK(bad.raw_output == "It is probably a bug.");
  CHECK_FALSE(bad.llm_verdict.has_value());
}

TEST_CASE("prompt rendering and truncation") {
  auto issue = make_issue("o/r", 9, "crash", std::string(50, 'b'), "2020-05-01T10:00:00Z", 5);
  CommentBudget budget{2, 8, 20};
  auto text = render_issue(issue, budget);
  CHECK(text.rfind("Issue: o/r#9\nTitle: crash\nState: open\n", 0) == 0);
  CHECK(text.find("[... body truncated ...]") != std::string::npos);
  CHECK(text.find("Comments (2 of 5 shown):") != std::string::npos);
  CHECK(text.find("[... 3 more comment(s) omitted ...]") != std::string::npos);
  CHECK(text.find("[... comment truncated ...]") != std::string::npos);
  CHECK(render_issue(make_issue("o/r", 1, "t", "", "2020-05-01T10:00:00Z", 0), {}).find("Comments: (none)") !=
        std::string::npos);

  testing::FunctionClient client([](const llm::ChatRequest&) { return kYes; });
  llm::LlmHandle h{&client, "openai/gpt-4o", 256};
  auto c = criteria();
  auto req = build_filter_prompt(issue, c, h);
  for (const auto& s : c.semantic) CHECK(req.user_text.find(s.name) != std::string::npos);
  CHECK(req.user_text.find("--- ISSUE ---\nIssue: o/r#9\n") != std::string::npos);
  CHECK(req.max_output_tokens == 256);
}

TEST_CASE("decisions round trip through json") {
  testing::FunctionClient client([](const llm::ChatRequest&) { return std::string("nope"); });
  llm::LlmHandle h{&client, "openai/gpt-4o", 256};
  auto d = judge(make_issue("o/r", 3, "crash", "b"), criteria(), h);
  auto back = filter_decision_from_json(to_json(d));
  CHECK(to_json(back) == to_json(d));
}

TEST_CASE("batch results are order independent and isolate failures") {
  std::vector<IssueRecord> records;
  for (int i = 1; i <= 40; ++i) records.push_back(make_issue("o/r", i, i % 3 ? "crash" : "question", "b"));
  testing::FunctionClient client([](const llm::ChatRequest& r) {
    auto key = testing::issue_of(r);
    if (key == "o/r#10") throw Error(ErrorCode::kReplayMiss, "no entry", "abc");
    return std::string(std::stoi(key.substr(4)) % 2 ? kYes : R"({"fault_related": false})");
  });
  llm::LlmHandle h{&client, "openai/gpt-4o", 256};
  auto serial = run_stage2(Corpus(records), criteria(), h, 1);
  std::size_t progress_calls = 0;
  auto parallel = run_stage2(Corpus(records), criteria(), h, 8, [&](std::size_t, std::size_t total) {
    CHECK(total == 40);
    ++progress_calls;
  });
  CHECK(progress_calls == 40);
  REQUIRE(serial.size() == 40);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(to_json(serial[i]) == to_json(parallel[i]));
    CHECK(serial[i].key.number == static_cast<std::int64_t>(i + 1));
    // invariant: a positive final decision implies every deterministic criterion passed
    if (serial[i].final) CHECK(serial[i].deterministic_passed());
  }
  CHECK(serial[9].error.has_value());
  CHECK(serial[9].error->rfind("replay_miss: o/r#10", 0) == 0);
  CHECK_FALSE(serial[9].final);
  CHECK(serial[10].final);

  std::reverse(records.begin(), records.end());
  auto reversed = run_stage2(Corpus(records), criteria(), h, 4);
  for (std::size_t i = 0; i < reversed.size(); ++i) CHECK(to_json(reversed[i]) == to_json(serial[39 - i]));
}

TEST_CASE("deterministic pass over 500 issues is fast") {
  auto scenario = testing::random_filter_scenario(500, 7);
  const VocabularyMatcher m(scenario.criteria.vocabulary);
  auto start = std::chrono::steady_clock::now();
  for (const auto& i : scenario.issues) apply_deterministic(i, scenario.criteria, m);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}
