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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faultloom/llm/chat.hpp"
#include "faultloom/llm/providers.hpp"
#include "faultloom/llm/rate_limiter.hpp"
#include "faultloom/llm/transcript.hpp"
#include "faultloom/retry.hpp"

namespace faultloom::llm {

enum class GatewayMode { kLive, kRecord, kReplay };

std::string_view to_string(GatewayMode mode);
GatewayMode gateway_mode_from_string(std::string_view text);

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;
EnvLookup process_environment();

using ProviderFactory = std::function<std::unique_ptr<Provider>(const ProviderSpec&, const std::string& api_key)>;
ProviderFactory http_provider_factory(HttpTransport& transport);

struct GatewayOptions {
  GatewayMode mode = GatewayMode::kReplay;
  RetryPolicy retry;
  LimiterOptions limits;
  std::map<std::string, LimiterOptions> provider_limits;
  // Additional providers (e.g. self-hosted OpenAI-compatible endpoints).
  std::vector<ProviderSpec> extra_providers;
};

// Provider-agnostic chat completion.
//
//   live    provider call with retries; nothing recorded
//   record  served from the transcript when already present, otherwise a live
//           call whose response is appended to the transcript
//   replay  transcript only; a missing digest is Error(kReplayMiss)
//
// Safe for concurrent use. Transient failures (transport, 429, 5xx) are
// retried with exponential backoff up to RetryPolicy::max_attempts; the
// attempt count lands in provider_meta["attempts"].
class LlmGateway final : public ChatClient {
 public:
  LlmGateway(GatewayOptions options, std::shared_ptr<Transcript> transcript, ProviderFactory factory,
             EnvLookup env = process_environment(), Sleeper sleeper = thread_sleeper());

  ChatResponse complete(const ChatRequest& request) override;

  // Throws kUnknownModel / kMissingCredentials when a live call for model_id
  // could not be made. No-op in replay mode.
  void check_ready(std::string_view model_id) const;

  GatewayMode mode() const { return options_.mode; }
  Usage total_usage() const;
  std::map<std::string, Usage> usage_by_model() const;

 private:
  const ProviderSpec& spec_for(const std::string& provider) const;
  Provider& provider_for(const std::string& provider);
  ChatResponse call_with_retries(const ChatRequest& request);
  void tally(const std::string& model_id, const ChatResponse& response);

  GatewayOptions options_;
  std::shared_ptr<Transcript> transcript_;
  ProviderFactory factory_;
  EnvLookup env_;
  Sleeper sleeper_;
  LimiterRegistry limiters_;

  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Provider>> providers_;
  std::map<std::string, Usage> usage_;
};

}  // namespace faultloom::llm
