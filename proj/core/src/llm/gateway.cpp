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

#include "faultloom/llm/gateway.hpp"

#include <cstdlib>

#include "faultloom/error.hpp"

namespace faultloom::llm {

std::string_view to_string(GatewayMode mode) {
  switch (mode) {
    case GatewayMode::kLive: return "live";
    case GatewayMode::kRecord: return "record";
    case GatewayMode::kReplay: return "replay";
  }
  return "replay";
}

GatewayMode gateway_mode_from_string(std::string_view text) {
  if (text == "live") return GatewayMode::kLive;
  if (text == "record") return GatewayMode::kRecord;
  if (text == "replay") return GatewayMode::kReplay;
  throw Error(ErrorCode::kConfig, "mode must be live, record or replay; got '" + std::string(text) + "'",
              std::string(text));
}

EnvLookup process_environment() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char* v = std::getenv(std::string(name).c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
}

ProviderFactory http_provider_factory(HttpTransport& transport) {
  return [&transport](const ProviderSpec& spec, const std::string& key) {
    return make_http_provider(spec, key, transport);
  };
}

LlmGateway::LlmGateway(GatewayOptions options, std::shared_ptr<Transcript> transcript, ProviderFactory factory,
                       EnvLookup env, Sleeper sleeper)
    : options_(std::move(options)),
      transcript_(std::move(transcript)),
      factory_(std::move(factory)),
      env_(std::move(env)),
      sleeper_(std::move(sleeper)),
      limiters_(options_.limits, options_.provider_limits) {
  if (options_.mode != GatewayMode::kLive && !transcript_) {
    throw Error(ErrorCode::kConfig, std::string(to_string(options_.mode)) + " mode requires a transcript");
  }
  if (options_.retry.max_attempts < 1) throw Error(ErrorCode::kConfig, "retry.max_attempts must be >= 1");
}

const ProviderSpec& LlmGateway::spec_for(const std::string& provider) const {
  for (const auto& s : options_.extra_providers) {
    if (s.name == provider) return s;
  }
  for (const auto& s : builtin_providers()) {
    if (s.name == provider) return s;
  }
  throw Error(ErrorCode::kUnknownModel, "no provider named '" + provider + "'", provider);
}

void LlmGateway::check_ready(std::string_view model_id) const {
  if (options_.mode == GatewayMode::kReplay) return;
  const auto provider = provider_of(model_id);
  spec_for(provider);
  const auto var = credential_env_var(provider);
  if (!env_(var)) {
    throw Error(ErrorCode::kMissingCredentials, "environment variable " + var + " is not set", var);
  }
}

Provider& LlmGateway::provider_for(const std::string& provider) {
  std::lock_guard lock(mu_);
  auto& slot = providers_[provider];
  if (!slot) {
    const auto& spec = spec_for(provider);
    const auto var = credential_env_var(provider);
    auto key = env_(var);
    if (!key) throw Error(ErrorCode::kMissingCredentials, "environment variable " + var + " is not set", var);
    slot = factory_(spec, *key);
  }
  return *slot;
}

ChatResponse LlmGateway::call_with_retries(const ChatRequest& request) {
  const auto provider_name = provider_of(request.model_id);
  auto& provider = provider_for(provider_name);
  auto& limiter = limiters_.for_provider(provider_name);
  Backoff backoff(options_.retry, fresh_seed());

  std::string last_failure;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    try {
      auto permit = limiter.acquire();
      auto response = provider.send(request);
      response.provider_meta["attempts"] = attempt;
      return response;
    } catch (const ProviderFailure& failure) {
      if (!failure.retryable()) throw;
      last_failure = failure.what();
      if (attempt < options_.retry.max_attempts) {
        auto delay = backoff.delay_after(attempt);
        if (failure.retry_after() && *failure.retry_after() > delay) delay = *failure.retry_after();
        sleeper_(delay);
      }
    }
  }
  throw Error(ErrorCode::kRetriesExhausted,
              request.model_id + ": giving up after " + std::to_string(options_.retry.max_attempts) +
                  " attempts; last failure: " + last_failure,
              request.model_id);
}

ChatResponse LlmGateway::complete(const ChatRequest& request) {
  validate(request);
  const auto digest = request_digest(request);

  if (options_.mode != GatewayMode::kLive) {
    if (auto stored = transcript_->find(digest)) {
      tally(request.model_id, *stored);
      return *stored;
    }
    if (options_.mode == GatewayMode::kReplay) {
      throw Error(ErrorCode::kReplayMiss, "no transcript entry for request digest " + digest, digest);
    }
  }

  auto response = call_with_retries(request);
  if (options_.mode == GatewayMode::kRecord) transcript_->append(digest, response);
  tally(request.model_id, response);
  return response;
}

void LlmGateway::tally(const std::string& model_id, const ChatResponse& response) {
  std::lock_guard lock(mu_);
  usage_[model_id].add(response);
}

Usage LlmGateway::total_usage() const {
  std::lock_guard lock(mu_);
  Usage total;
  for (const auto& [_, u] : usage_) total += u;
  return total;
}

std::map<std::string, Usage> LlmGateway::usage_by_model() const {
  std::lock_guard lock(mu_);
  return usage_;
}

}  // namespace faultloom::llm
