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

#include "faultloom/llm/rate_limiter.hpp"

#include <algorithm>

#include "faultloom/error.hpp"

namespace faultloom::llm {

ProviderLimiter::ProviderLimiter(LimiterOptions options)
    : options_(options), last_refill_(std::chrono::steady_clock::now()) {
  if (options_.max_concurrent < 1) throw Error(ErrorCode::kInvalidArgument, "max_concurrent must be >= 1");
  if (options_.requests_per_minute < 0) {
    throw Error(ErrorCode::kInvalidArgument, "requests_per_minute must be >= 0");
  }
  capacity_ = std::max(1.0, options_.requests_per_minute / 60.0);
  tokens_ = capacity_;
}

void ProviderLimiter::refill_locked(std::chrono::steady_clock::time_point now) {
  std::chrono::duration<double> elapsed = now - last_refill_;
  tokens_ = std::min(capacity_, tokens_ + elapsed.count() * options_.requests_per_minute / 60.0);
  last_refill_ = now;
}

ProviderLimiter::Permit ProviderLimiter::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    if (in_flight_ < options_.max_concurrent) {
      if (options_.requests_per_minute <= 0.0) break;
      refill_locked(std::chrono::steady_clock::now());
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        break;
      }
      auto wait = std::chrono::duration<double>((1.0 - tokens_) * 60.0 / options_.requests_per_minute);
      cv_.wait_for(lock, wait);
    } else {
      cv_.wait(lock);
    }
  }
  ++in_flight_;
  return Permit(this);
}

void ProviderLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_all();
}

int ProviderLimiter::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

ProviderLimiter::Permit::~Permit() {
  if (owner_ != nullptr) owner_->release();
}

LimiterRegistry::LimiterRegistry(LimiterOptions defaults, std::map<std::string, LimiterOptions> overrides)
    : defaults_(defaults), overrides_(std::move(overrides)) {}

ProviderLimiter& LimiterRegistry::for_provider(const std::string& provider) {
  std::lock_guard lock(mu_);
  auto& slot = limiters_[provider];
  if (!slot) {
    auto it = overrides_.find(provider);
    slot = std::make_unique<ProviderLimiter>(it == overrides_.end() ? defaults_ : it->second);
  }
  return *slot;
}

}  // namespace faultloom::llm
