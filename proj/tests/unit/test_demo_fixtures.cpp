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

#include <nlohmann/json.hpp>

#include "demo/demo.hpp"
#include "faultloom/text.hpp"
#include "support/support.hpp"

using namespace faultloom;

TEST_CASE("shipped demo fixtures match a fresh regeneration") {
  testing::TempDir dir;
  const auto fresh = dir / "demo";
  demo::write_demo_fixtures(fresh, testing::data_dir() / "taxonomies");
  const auto shipped = testing::data_dir() / "demo";
  for (const char* name : {"corpus.jsonl", "gold.csv", "vocabulary.txt", "criteria.json", "reference.txt",
                           "transcript.jsonl"}) {
    INFO(name);
    CHECK(text::read_file(fresh / name) == text::read_file(shipped / name));
  }
  // Only the taxonomy paths depend on where the fixtures were written.
  auto a = testing::read_json(fresh / "faultloom.json");
  auto b = testing::read_json(shipped / "faultloom.json");
  a.erase("taxonomies");
  b.erase("taxonomies");
  CHECK(a == b);
}

TEST_CASE("synthetic study is balanced and deterministic") {
  auto tax = testing::fixture_taxonomies();
  demo::SyntheticSpec spec;
  spec.positives = 20;
  spec.negatives = 30;
  auto s1 = demo::make_synthetic_study(spec, tax);
  auto s2 = demo::make_synthetic_study(spec, tax);
  CHECK(s1.corpus.size() == 50);
  CHECK(s1.corpus.records() == s2.corpus.records());
  int pos = 0;
  for (const auto& g : s1.gold.labels()) {
    if (*g.fault_related) {
      ++pos;
      CHECK(tax.symptoms.is_leaf_granular(tax.symptoms.node(*g.symptom_leaf)));
      CHECK(tax.root_causes.is_leaf_granular(tax.root_causes.node(*g.root_cause)));
    }
  }
  CHECK(pos == 20);
}
