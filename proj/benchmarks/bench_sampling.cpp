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

#include "faultloom/corpus.hpp"
#include "faultloom/sampling.hpp"
#include "support/support.hpp"

namespace {

void BM_SampleBalanced(benchmark::State& state) {
  const auto dir = faultloom::testing::data_dir() / "demo";
  auto corpus = faultloom::import_dump(dir / "corpus.jsonl");
  auto gold = faultloom::load_gold_file(dir / "gold.csv");
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(faultloom::sample_balanced(corpus, gold, {250, 250, seed++}));
}
BENCHMARK(BM_SampleBalanced);

}  // namespace
