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

#pragma once

#include <cstdint>
#include <random>

#include "faultloom/corpus.hpp"

namespace faultloom {

// 64-bit Mersenne Twister with a hand-rolled bounded draw. The engine's output
// sequence is fixed by the standard; std::uniform_int_distribution is not, so
// it is avoided to keep selections identical across standard libraries.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Unbiased draw in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

struct SampleRequest {
  std::size_t n_pos = 250;
  std::size_t n_neg = 250;
  std::uint64_t seed = 0;
};

// Draws exactly n_pos gold-positive and n_neg gold-negative records uniformly
// without replacement. Strata are ordered by key before drawing, so the
// selection depends only on (corpus contents, gold, seed). The result keeps
// corpus order. Throws Error(kInsufficientStratum) reporting the shortfall.
Corpus sample_balanced(const Corpus& corpus, const GoldSet& gold, const SampleRequest& request);

}  // namespace faultloom
