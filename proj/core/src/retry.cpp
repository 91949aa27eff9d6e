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

#include "faultloom/retry.hpp"

#include <algorithm>
#include <random>
#include <thread>

namespace faultloom {

Backoff::Backoff(RetryPolicy policy, std::uint64_t seed) : policy_(policy), rng_(seed) {}

std::chrono::milliseconds Backoff::delay_after(int failed_attempts) {
  const int shift = std::clamp(failed_attempts - 1, 0, 30);
  auto base = policy_.base_delay.count() << shift;
  auto capped = std::min<std::int64_t>(base, policy_.max_delay.count());
  if (capped <= 0) return std::chrono::milliseconds{0};
  auto jitter_span = static_cast<std::int64_t>(static_cast<double>(capped) * std::clamp(policy_.jitter, 0.0, 1.0));
  auto fixed = capped - jitter_span;
  auto random = jitter_span > 0 ? static_cast<std::int64_t>(rng_.below(static_cast<std::uint64_t>(jitter_span) + 1)) : 0;
  return std::chrono::milliseconds{fixed + random};
}

Sleeper thread_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace faultloom
