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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faultloom/error.hpp"
#include "faultloom/http.hpp"
#include "faultloom/llm/chat.hpp"

namespace faultloom::llm {

enum class FailureKind { kTransport, kRateLimited, kServer, kAuth, kRejected };

// A single failed provider call. Transport, rate-limit and server failures are
// transient; auth failures and request rejections are not.
class ProviderFailure : public Error {
 public:
  ProviderFailure(FailureKind kind, std::string message, std::optional<std::chrono::milliseconds> retry_after = {});

  FailureKind kind() const noexcept { return kind_; }
  bool retryable() const noexcept;
  std::optional<std::chrono::milliseconds> retry_after() const noexcept { return retry_after_; }

 private:
  FailureKind kind_;
  std::optional<std::chrono::milliseconds> retry_after_;
};

// One raw call to a hosted model, no retries.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

enum class ProviderFamily { kOpenAiCompatible, kAnthropic, kGemini };

struct ProviderSpec {
  std::string name;  // the model_id prefix, e.g. "openai"
  ProviderFamily family = ProviderFamily::kOpenAiCompatible;
  std::string base_url;
};

// Built-in providers: openai, deepseek (OpenAI-compatible), anthropic, google.
const std::vector<ProviderSpec>& builtin_providers();

// "openai/gpt-4o" -> "openai"; throws Error(kUnknownModel) without a prefix.
std::string provider_of(std::string_view model_id);
std::string model_name_of(std::string_view model_id);
// FAULTLOOM_API_KEY_<PROVIDER>, provider name uppercased, '-' mapped to '_'.
std::string credential_env_var(std::string_view provider);

std::unique_ptr<Provider> make_http_provider(const ProviderSpec& spec, std::string api_key, HttpTransport& transport);

}  // namespace faultloom::llm
