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

#include "faultloom/corpus.hpp"
#include "faultloom/error.hpp"
#include "faultloom/text.hpp"
#include "faultloom/time.hpp"
#include "support/support.hpp"

using namespace faultloom;
using faultloom::testing::make_issue;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::string line_of(const IssueRecord& r) { return to_json(r).dump() + "\n"; }

}  // namespace

TEST_CASE("issue keys") {
  auto k = IssueKey::parse("tensorflow/tfjs#42");
  CHECK(k.repo == "tensorflow/tfjs");
  CHECK(k.number == 42);
  CHECK(k.to_string() == "tensorflow/tfjs#42");
  CHECK(IssueKey{"a/b", 2} < IssueKey{"a/b", 10});
  CHECK(IssueKey{"a/b", 10} < IssueKey{"a/c", 1});
  CHECK_THROWS_AS(IssueKey::parse("tfjs#1"), Error);
  CHECK_THROWS_AS(IssueKey::parse("a/b#x"), Error);
}

TEST_CASE("record validation") {
  auto ok = make_issue("o/r", 1, "t", "b");
  CHECK_NOTHROW(validate(ok));

  auto bad_repo = ok;
  bad_repo.repo = "no-slash";
  CHECK(code_of([&] { validate(bad_repo); }) == ErrorCode::kMalformedRecord);

  auto bad_number = ok;
  bad_number.number = 0;
  CHECK(code_of([&] { validate(bad_number); }) == ErrorCode::kMalformedRecord);

  auto time_travel = ok;
  time_travel.updated_at = ok.created_at - std::chrono::seconds(1);
  CHECK(code_of([&] { validate(time_travel); }) == ErrorCode::kTimestampOrder);

  auto closed_no_time = ok;
  closed_no_time.state = IssueState::kClosed;
  CHECK(code_of([&] { validate(closed_no_time); }) == ErrorCode::kMalformedRecord);

  auto open_with_time = ok;
  open_with_time.closed_at = ok.updated_at;
  CHECK(code_of([&] { validate(open_with_time); }) == ErrorCode::kMalformedRecord);

  auto unsorted = make_issue("o/r", 1, "t", "b", "2020-05-01T10:00:00Z", 2);
  std::swap(unsorted.comments[0], unsorted.comments[1]);
  CHECK(code_of([&] { validate(unsorted); }) == ErrorCode::kTimestampOrder);
}

TEST_CASE("dump round trip") {
  auto a = make_issue("o/r", 1, "first", "body \"quoted\"\nnext line");
  auto b = make_issue("o/r", 2, "second", "", "2021-01-01T00:00:00Z", 0, {"type:bug"});
  b.state = IssueState::kClosed;
  b.closed_at = b.updated_at + std::chrono::hours(3);
  b.updated_at = *b.closed_at;
  Corpus c({a, b});
  auto text = serialize_dump(c);
  auto back = parse_dump(text);
  REQUIRE(back.size() == 2);
  CHECK(back.records()[0] == a);
  CHECK(back.records()[1] == b);
  CHECK(serialize_dump(back) == text);
}

TEST_CASE("dump errors carry line numbers") {
  auto a = make_issue("o/r", 1, "t", "b");
  auto dup = line_of(a) + "\n" + line_of(a);
  try {
    parse_dump(dup);
    FAIL("expected duplicate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDuplicateKey);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  auto j = to_json(a);
  j["surprise"] = 1;
  CHECK(code_of([&] { parse_dump(line_of(a) + j.dump() + "\n"); }) == ErrorCode::kMalformedRecord);
  j = to_json(a);
  j.erase("title");
  CHECK(code_of([&] { parse_dump(j.dump()); }) == ErrorCode::kMalformedRecord);
  try {
    parse_dump(line_of(a) + "{not json\n");
    FAIL("expected parse failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("import uses file modification time as provenance") {
  testing::TempDir dir;
  text::write_file_atomic(dir / "d.jsonl", line_of(make_issue("o/r", 1, "t", "b")));
  auto c = import_dump(dir / "d.jsonl");
  CHECK(c.provenance().source == CorpusSource::kDump);
  CHECK(c.provenance().fetched_at > parse_rfc3339("2020-01-01T00:00:00Z"));
  CHECK_THROWS_AS(import_dump(dir / "missing.jsonl"), Error);
}

TEST_CASE("merge rejects keys repeated across parts") {
  Corpus a({make_issue("o/r", 1, "t", "b")});
  Corpus b({make_issue("o/r", 2, "t", "b")});
  CHECK(merge({a, b}).size() == 2);
  CHECK(code_of([&] { merge({a, a}); }) == ErrorCode::kDuplicateKey);
}

TEST_CASE("gold csv") {
  auto gold = parse_gold_csv(
      "repo,number,fault_related,symptom_leaf_id,root_cause_id,notes\n"
      "o/r,1,true,crash.type_error.invalid_argument_type,incorrect_programming.api_misuse,\"a, b\"\n"
      "o/r,2,FALSE,,,\n"
      "o/r,4,yes,,unknown,\n");
  REQUIRE(gold.size() == 3);
  CHECK(gold.find({"o/r", 1})->fault_related == true);
  CHECK(gold.find({"o/r", 1})->symptom_leaf == "crash.type_error.invalid_argument_type");
  CHECK(gold.find({"o/r", 2})->fault_related == false);
  CHECK_FALSE(gold.find({"o/r", 4})->fault_related.value() == false);
  CHECK(gold.find({"o/r", 1})->root_cause == "incorrect_programming.api_misuse");
  CHECK(gold.find({"o/r", 4})->root_cause == "unknown");
  CHECK(gold.find({"o/r", 5}) == nullptr);

  auto again = parse_gold_csv(serialize_gold_csv(gold));
  CHECK(serialize_gold_csv(again) == serialize_gold_csv(gold));

  CHECK(code_of([] { parse_gold_csv("repo,number,fault_related,symptom_leaf_id,root_cause_id\no/r,3,,,\n"); }) ==
        ErrorCode::kMalformedRecord);
  CHECK(code_of([] { parse_gold_csv("repo,number,fault_related\n"); }) == ErrorCode::kMalformedDocument);
  CHECK(code_of([] { parse_gold_csv("repo,number,fault_related,symptom_leaf_id,root_cause_id\no/r,1,maybe,,\n"); }) ==
        ErrorCode::kMalformedRecord);
  CHECK(code_of([] {
          parse_gold_csv("repo,number,fault_related,symptom_leaf_id,root_cause_id\no/r,1,true,,\no/r,1,false,,\n");
        }) == ErrorCode::kDuplicateKey);
}

TEST_CASE("gold ids must resolve") {
  auto t = testing::fixture_taxonomies();
  GoldSet ok;
  ok.add({{"o/r", 1}, true, "poor_performance.memory_issue.memory_leak", "unknown"});
  CHECK_NOTHROW(validate_gold(ok, &t.symptoms, &t.root_causes));
  GoldSet bad;
  bad.add({{"o/r", 1}, true, "poor_performance.memory_issue.memory_lake", std::nullopt});
  CHECK(code_of([&] { validate_gold(bad, &t.symptoms, &t.root_causes); }) == ErrorCode::kUnresolvableGold);
}
