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

#include "faultloom/llm/structured.hpp"

namespace {

void BM_ExtractStructured(benchmark::State& state) {
  std::string text(static_cast<std::size_t>(state.range(0)), ' ');
  for (std::size_t i = 0; i < text.size(); i += 7) text[i] = '{';  // unbalanced noise before the object
  text += "```json\n{\"symptom\": \"Memory Leak\", \"root_cause\": \"API Misuse\", \"rationale\": \"x\"}\n```";
  for (auto _ : state) benchmark::DoNotOptimize(faultloom::llm::extract_structured(text, {"symptom", "root_cause"}));
}
BENCHMARK(BM_ExtractStructured)->Arg(0)->Arg(256)->Arg(4096);

}  // namespace
