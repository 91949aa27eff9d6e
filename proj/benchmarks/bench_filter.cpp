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

#include <benchmark/benchmark.h>

#include "faultloom/filter.hpp"
#include "support/support.hpp"

namespace {

void BM_DeterministicFilter(benchmark::State& state) {
  auto scenario = faultloom::testing::random_filter_scenario(static_cast<std::size_t>(state.range(0)), 1);
  const faultloom::VocabularyMatcher matcher(scenario.criteria.vocabulary);
  for (auto _ : state) {
    for (const auto& issue : scenario.issues) {
      benchmark::DoNotOptimize(faultloom::apply_deterministic(issue, scenario.criteria, matcher));
    }
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DeterministicFilter)->Arg(500)->Arg(5000);

void BM_RenderIssue(benchmark::State& state) {
  auto issue = faultloom::testing::make_issue("o/r", 1, "crash", std::string(20000, 'x'), "2020-05-01T10:00:00Z", 40);
  for (auto _ : state) benchmark::DoNotOptimize(faultloom::render_issue(issue, {}));
}
BENCHMARK(BM_RenderIssue);

}  // namespace
