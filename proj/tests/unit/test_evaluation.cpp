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
#include <random>

#include "faultloom/error.hpp"
#include "faultloom/evaluation.hpp"
#include "support/support.hpp"

using namespace faultloom;

namespace {

const TaxonomyPair& tax() {
  static const auto t = testing::fixture_taxonomies();
  return t;
}

std::string sid(std::string_view name) { return resolve_label(tax().symptoms, name).id; }
std::string rid(std::string_view name) { return resolve_label(tax().root_causes, name).id; }

FilterDecision decision(int n, bool final, bool errored = false) {
  FilterDecision d;
  d.key = {"o/r", n};
  d.final = final;
  if (errored) d.error = "network: down";
  return d;
}

FaultLabel label(int n, std::optional<std::string> s, std::optional<std::string> r) {
  FaultLabel l;
  l.key = {"o/r", n};
  l.symptom_leaf = std::move(s);
  l.root_cause = std::move(r);
  l.valid = l.symptom_leaf && l.root_cause;
  return l;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("confusion matrix bookkeeping") {
  ConfusionMatrix m({"a", "b"});
  CHECK(m.classes() == std::vector<std::string>{"a", "b", "invalid"});
  m.add(0, 0);
  m.add(0, 2);
  m.add(1, 0);
  m.add(1, 1);
  CHECK(m.total() == 4);
  CHECK(m.trace() == 2);
  CHECK(m.row_sum(0) == 2);
  CHECK(m.column_sum(0) == 2);
  CHECK(m.column_sum(2) == 1);
  CHECK_THROWS_AS(m.add(2, 0), Error);
  CHECK_THROWS_AS(m.index_of("c"), Error);
  CHECK(confusion_csv(m) == "gold\\predicted,a,b,invalid\na,1,0,1\nb,1,1,0\ninvalid,0,0,0\n");
  auto scores = per_class_scores(m);
  CHECK(scores[0].precision == Ratio(1, 2));
  CHECK(scores[0].recall == Ratio(1, 2));
  CHECK(scores[1].precision == Ratio(1, 1));
}

TEST_CASE("stage II metrics on the hand-counted fixture") {
  auto c = testing::stage2_fixture();
  auto s = score_stage2(c.decisions, c.gold);
  CHECK(s.tp == 6);
  CHECK(s.fp == 2);
  CHECK(s.fn == 1);
  CHECK(s.tn == 1);
  CHECK(s.accuracy == Ratio(7, 10));
  CHECK(s.precision == Ratio(3, 4));
  CHECK(s.recall == Ratio(6, 7));
  CHECK(s.confusion.at(0, 0) == 6);
  CHECK(s.confusion.at(1, 0) == 2);
  CHECK(s.confusion.at(0, 1) == 1);
  CHECK(s.confusion.at(1, 1) == 1);
}

TEST_CASE("stage II errors, exclusions and empty input") {
  GoldSet gold;
  gold.add({{"o/r", 1}, true, std::nullopt, std::nullopt});
  gold.add({{"o/r", 2}, false, std::nullopt, std::nullopt});
  auto s = score_stage2({decision(1, true, true), decision(2, false), decision(3, true)}, gold, MissingGold::kExclude);
  CHECK(s.scored == 2);
  CHECK(s.excluded == 1);
  CHECK(s.errored == 1);
  CHECK(s.fn == 1);
  CHECK(s.confusion.at(0, s.confusion.invalid_index()) == 1);
  CHECK_FALSE(s.precision.has_value());
  CHECK(s.recall == Ratio(0, 1));
  CHECK(code_of([&] { score_stage2({decision(3, true)}, gold); }) == ErrorCode::kMissingGold);
  CHECK(code_of([&] { score_stage2({}, gold); }) == ErrorCode::kNothingToScore);
}

TEST_CASE("stage III hierarchical accuracy") {
  auto c = testing::stage3_fixture(tax());
  const auto& labels = c.labels;
  const auto& gold = c.gold;
  auto s = score_stage3(labels, gold, tax().symptoms, 3);
  CHECK(s.accuracy == Ratio(3, 4));
  CHECK(s.per_level == std::vector<Ratio>{Ratio(1, 1), Ratio(1, 1), Ratio(3, 4)});
  const auto& m = s.confusion;
  CHECK(m.at(m.index_of(sid("Memory Leak")), m.index_of(sid("Out of Memory"))) == 1);
  CHECK(m.size() == tax().symptoms.leaves().size() + 1);

  auto r = score_stage3(labels, gold, tax().root_causes, 2);
  CHECK(r.accuracy == Ratio(2, 4));
  CHECK(r.per_level == std::vector<Ratio>{Ratio(1, 1), Ratio(2, 4)});

  auto l2 = score_stage3(labels, gold, tax().symptoms, 2);
  CHECK(l2.accuracy == Ratio(1, 1));
  CHECK(l2.confusion.size() == tax().symptoms.granular_nodes(2).size() + 1);
  CHECK(hierarchical_accuracy(labels, gold, tax().symptoms, 1) == Ratio(1, 1));
}

TEST_CASE("siblings agree one level up") {
  GoldSet gold;
  gold.add({{"o/r", 1}, true, sid("DL Operator Exception"), rid("Unknown")});
  std::vector<FaultLabel> labels = {label(1, sid("Function Inaccessible"), rid("Unknown"))};
  auto s = score_stage3(labels, gold, tax().symptoms, 3);
  CHECK(s.per_level == std::vector<Ratio>{Ratio(1, 1), Ratio(1, 1), Ratio(0, 1)});
}

TEST_CASE("invalid labels score as wrong") {
  GoldSet gold;
  std::vector<FaultLabel> labels;
  for (int i = 1; i <= 3; ++i) {
    gold.add({{"o/r", i}, true, sid("Slow Inference"), rid("Unknown")});
    labels.push_back(label(i, std::nullopt, std::nullopt));
  }
  labels[1] = label(2, sid("Poor Performance"), rid("Unknown"));  // not assignable
  auto s = score_stage3(labels, gold, tax().symptoms, 3);
  CHECK(s.accuracy == Ratio(0, 3));
  CHECK(s.invalid == 3);
  CHECK(s.per_level[0] == Ratio(0, 3));
  CHECK(s.confusion.column_sum(s.confusion.invalid_index()) == 3);
}

TEST_CASE("gold must be assignable") {
  GoldSet gold;
  gold.add({{"o/r", 1}, true, sid("Memory Issue"), rid("Unknown")});
  std::vector<FaultLabel> labels = {label(1, sid("Memory Leak"), rid("Unknown"))};
  CHECK(code_of([&] { score_stage3(labels, gold, tax().symptoms, 3); }) == ErrorCode::kUnresolvableGold);
  CHECK(code_of([&] { score_stage3(labels, gold, tax().symptoms, 4); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { score_stage3({}, gold, tax().symptoms, 3); }) == ErrorCode::kNothingToScore);
  GoldSet partial;
  partial.add({{"o/r", 1}, true, std::nullopt, rid("Unknown")});
  CHECK(code_of([&] { score_stage3(labels, partial, tax().symptoms, 3); }) == ErrorCode::kMissingGold);
}

TEST_CASE("accuracy never rises with depth (1000 random items)") {
  auto c = testing::random_stage3_case(tax(), 1000, 2024);
  for (auto kind : {TaxonomyKind::kSymptom, TaxonomyKind::kRootCause}) {
    const auto& t = kind == TaxonomyKind::kSymptom ? tax().symptoms : tax().root_causes;
    auto s = score_stage3(c.labels, c.gold, t, t.leaf_level());
    for (int level = 1; level <= t.leaf_level(); ++level) {
      CHECK(s.per_level[level - 1] == testing::naive_level_accuracy(c, tax(), kind, level));
      CHECK(hierarchical_accuracy(c.labels, c.gold, t, level) == s.per_level[level - 1]);
      if (level > 1) CHECK(s.per_level[level - 2] >= s.per_level[level - 1]);
    }
  }
}

TEST_CASE("scores ignore input order") {
  auto c = testing::random_stage3_case(tax(), 300, 11);
  auto before = to_json(score_stage3(c.labels, c.gold, tax().symptoms, 3));
  std::mt19937 g(5);
  std::shuffle(c.labels.begin(), c.labels.end(), g);
  CHECK(to_json(score_stage3(c.labels, c.gold, tax().symptoms, 3)) == before);

  auto d = testing::random_stage2_case(300, 11);
  auto before2 = to_json(score_stage2(d.decisions, d.gold));
  std::shuffle(d.decisions.begin(), d.decisions.end(), g);
  CHECK(to_json(score_stage2(d.decisions, d.gold)) == before2);
}

TEST_CASE("row sums equal gold counts over 100 random runs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto d = testing::random_stage2_case(50 + seed, seed);
    auto s2 = score_stage2(d.decisions, d.gold);
    std::int64_t pos = 0;
    for (const auto& g : d.gold.labels()) pos += *g.fault_related;
    REQUIRE(s2.confusion.row_sum(0) == pos);
    REQUIRE(s2.confusion.row_sum(1) == s2.scored - pos);

    auto c = testing::random_stage3_case(tax(), 50 + seed, seed);
    auto s3 = score_stage3(c.labels, c.gold, tax().root_causes, 2);
    std::map<std::string, std::int64_t> gold_counts;
    for (const auto& g : c.gold.labels()) ++gold_counts[*g.root_cause];
    const auto& m = s3.confusion;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
      auto it = gold_counts.find(m.classes()[i]);
      REQUIRE(m.row_sum(i) == (it == gold_counts.end() ? 0 : it->second));
    }
    REQUIRE(m.row_sum(m.invalid_index()) == 0);
  }
}
