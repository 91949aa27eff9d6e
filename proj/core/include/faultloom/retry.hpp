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

#include <chrono>
#include <cstdint>
#include <functional>

#include "faultloom/sampling.hpp"

namespace faultloom {

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30'000};
  // Fraction of each delay that is randomized ("equal jitter" at 0.5).
  double jitter = 0.5;
};

// Exponential backoff: the n-th failure waits min(max_delay, base * 2^(n-1)),
// with the top `jitter` fraction of that drawn uniformly.
class Backoff {
 public:
  Backoff(RetryPolicy policy, std::uint64_t seed);
  std::chrono::milliseconds delay_after(int failed_attempts);

 private:
  RetryPolicy policy_;
  PortableRng rng_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper thread_sleeper();

std::uint64_t fresh_seed();

}  // namespace faultloom
