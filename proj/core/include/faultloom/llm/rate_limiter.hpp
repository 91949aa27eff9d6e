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
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace faultloom::llm {

struct LimiterOptions {
  int max_concurrent = 4;
  // 0 disables the requests-per-minute bucket.
  double requests_per_minute = 0.0;
};

// Bounds in-flight requests and, optionally, the request rate with a token
// bucket holding up to one second of burst.
class ProviderLimiter {
 public:
  explicit ProviderLimiter(LimiterOptions options);

  class Permit {
   public:
    explicit Permit(ProviderLimiter* owner) : owner_(owner) {}
    Permit(Permit&& other) noexcept : owner_(other.owner_) { other.owner_ = nullptr; }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit();

   private:
    ProviderLimiter* owner_;
  };

  Permit acquire();
  int in_flight() const;

 private:
  void release();
  void refill_locked(std::chrono::steady_clock::time_point now);

  LimiterOptions options_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  double tokens_ = 0.0;
  double capacity_ = 1.0;
  std::chrono::steady_clock::time_point last_refill_;
};

class LimiterRegistry {
 public:
  LimiterRegistry(LimiterOptions defaults, std::map<std::string, LimiterOptions> overrides = {});
  ProviderLimiter& for_provider(const std::string& provider);

 private:
  LimiterOptions defaults_;
  std::map<std::string, LimiterOptions> overrides_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<ProviderLimiter>> limiters_;
};

}  // namespace faultloom::llm
