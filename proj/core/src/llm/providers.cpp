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

#include "faultloom/llm/providers.hpp"

#include <chrono>

#include "faultloom/text.hpp"

namespace faultloom::llm {

using nlohmann::json;

ProviderFailure::ProviderFailure(FailureKind kind, std::string message,
                                 std::optional<std::chrono::milliseconds> retry_after)
    : Error(kind == FailureKind::kAuth ? ErrorCode::kAuth
            : kind == FailureKind::kRejected ? ErrorCode::kProviderRejected
            : kind == FailureKind::kRateLimited ? ErrorCode::kRateLimited
                                                : ErrorCode::kNetwork,
            std::move(message)),
      kind_(kind),
      retry_after_(retry_after) {}

bool ProviderFailure::retryable() const noexcept {
  return kind_ == FailureKind::kTransport || kind_ == FailureKind::kRateLimited || kind_ == FailureKind::kServer;
}

const std::vector<ProviderSpec>& builtin_providers() {
  static const std::vector<ProviderSpec> specs = {
      {"openai", ProviderFamily::kOpenAiCompatible, "https://api.openai.com/v1"},
      {"deepseek", ProviderFamily::kOpenAiCompatible, "https://api.deepseek.com/v1"},
      {"anthropic", ProviderFamily::kAnthropic, "https://api.anthropic.com/v1"},
      {"google", ProviderFamily::kGemini, "https://generativelanguage.googleapis.com/v1beta"},
  };
  return specs;
}

std::string provider_of(std::string_view model_id) {
  auto slash = model_id.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == model_id.size()) {
    throw Error(ErrorCode::kUnknownModel, "model id must look like '<provider>/<model>': '" + std::string(model_id) + "'",
                std::string(model_id));
  }
  return std::string(model_id.substr(0, slash));
}

std::string model_name_of(std::string_view model_id) {
  provider_of(model_id);
  return std::string(model_id.substr(model_id.find('/') + 1));
}

std::string credential_env_var(std::string_view provider) {
  std::string var = "FAULTLOOM_API_KEY_";
  for (char c : provider) var.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return var;
}

namespace {

std::optional<std::chrono::milliseconds> parse_retry_after(const HttpResponse& response) {
  if (const auto* v = response.header("retry-after")) {
    try {
      return std::chrono::milliseconds{static_cast<long long>(std::stod(*v) * 1000.0)};
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

// Maps a non-2xx status onto a failure kind.
[[noreturn]] void raise_for_status(const HttpResponse& response, const std::string& provider) {
  auto snippet = response.body.substr(0, 300);
  auto msg = provider + " returned HTTP " + std::to_string(response.status) + ": " + snippet;
  if (response.status == 429) throw ProviderFailure(FailureKind::kRateLimited, msg, parse_retry_after(response));
  if (response.status >= 500) throw ProviderFailure(FailureKind::kServer, msg, parse_retry_after(response));
  if (response.status == 401 || response.status == 403) throw ProviderFailure(FailureKind::kAuth, msg);
  throw ProviderFailure(FailureKind::kRejected, msg);
}

class HttpProvider : public Provider {
 public:
  HttpProvider(ProviderSpec spec, std::string api_key, HttpTransport& transport)
      : spec_(std::move(spec)), api_key_(std::move(api_key)), transport_(transport) {}

  ChatResponse send(const ChatRequest& request) final {
    auto http = build(request);
    http.method = "POST";
    http.headers.emplace_back("Content-Type", "application/json");
    auto start = std::chrono::steady_clock::now();
    HttpResponse response;
    try {
      response = transport_.send(http);
    } catch (const Error& e) {
      throw ProviderFailure(FailureKind::kTransport, e.what());
    }
    auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    if (response.status < 200 || response.status >= 300) raise_for_status(response, spec_.name);

    json body = json::parse(response.body, nullptr, false);
    if (body.is_discarded()) {
      throw ProviderFailure(FailureKind::kServer, spec_.name + " returned a non-JSON body");
    }
    ChatResponse out;
    try {
      out = parse(body);
    } catch (const json::exception& e) {
      throw ProviderFailure(FailureKind::kServer, spec_.name + " response missing expected fields: " + e.what());
    }
    out.latency_ms = latency.count();
    out.provider_meta["provider"] = spec_.name;
    const bool truncated = out.provider_meta.value("truncated", false);
    if (out.text.empty() && !truncated) {
      throw ProviderFailure(FailureKind::kServer, spec_.name + " returned an empty completion");
    }
    return out;
  }

 protected:
  virtual HttpRequest build(const ChatRequest& request) const = 0;
  virtual ChatResponse parse(const json& body) const = 0;

  ProviderSpec spec_;
  std::string api_key_;
  HttpTransport& transport_;
};

class OpenAiCompatibleProvider final : public HttpProvider {
 public:
  using HttpProvider::HttpProvider;

 private:
  HttpRequest build(const ChatRequest& request) const override {
    const auto model = model_name_of(request.model_id);
    json body{{"model", model},
              {"messages",
               json::array({{{"role", "system"}, {"content", request.system_text}},
                            {{"role", "user"}, {"content", request.user_text}}})}};
    // o-series reasoning models reject temperature and max_tokens.
    const bool reasoning = model.size() >= 2 && model[0] == 'o' && model[1] >= '0' && model[1] <= '9';
    if (!reasoning) body["temperature"] = request.temperature;
    body[spec_.name == "openai" ? "max_completion_tokens" : "max_tokens"] = request.max_output_tokens;
    HttpRequest http;
    http.url = spec_.base_url + "/chat/completions";
    http.headers = {{"Authorization", "Bearer " + api_key_}};
    http.body = body.dump();
    return http;
  }

  ChatResponse parse(const json& body) const override {
    ChatResponse out;
    const auto& choice = body.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    out.text = content.is_string() ? content.get<std::string>() : std::string{};
    if (auto usage = body.find("usage"); usage != body.end()) {
      out.input_tokens = usage->value("prompt_tokens", std::int64_t{0});
      out.output_tokens = usage->value("completion_tokens", std::int64_t{0});
    }
    auto finish = choice.value("finish_reason", std::string{});
    out.provider_meta["finish_reason"] = finish;
    out.provider_meta["truncated"] = finish == "length";
    return out;
  }
};

class AnthropicProvider final : public HttpProvider {
 public:
  using HttpProvider::HttpProvider;

 private:
  HttpRequest build(const ChatRequest& request) const override {
    json body{{"model", model_name_of(request.model_id)},
              {"system", request.system_text},
              {"messages", json::array({{{"role", "user"}, {"content", request.user_text}}})},
              {"max_tokens", request.max_output_tokens},
              {"temperature", request.temperature}};
    HttpRequest http;
    http.url = spec_.base_url + "/messages";
    http.headers = {{"x-api-key", api_key_}, {"anthropic-version", "2023-06-01"}};
    http.body = body.dump();
    return http;
  }

  ChatResponse parse(const json& body) const override {
    ChatResponse out;
    for (const auto& block : body.at("content")) {
      if (block.value("type", "") == "text") out.text += block.value("text", "");
    }
    if (auto usage = body.find("usage"); usage != body.end()) {
      out.input_tokens = usage->value("input_tokens", std::int64_t{0});
      out.output_tokens = usage->value("output_tokens", std::int64_t{0});
    }
    auto stop = body.value("stop_reason", std::string{});
    out.provider_meta["finish_reason"] = stop;
    out.provider_meta["truncated"] = stop == "max_tokens";
    return out;
  }
};

class GeminiProvider final : public HttpProvider {
 public:
  using HttpProvider::HttpProvider;

 private:
  HttpRequest build(const ChatRequest& request) const override {
    json body{{"systemInstruction", {{"parts", json::array({{{"text", request.system_text}}})}}},
              {"contents", json::array({{{"role", "user"}, {"parts", json::array({{{"text", request.user_text}}})}}})},
              {"generationConfig",
               {{"temperature", request.temperature}, {"maxOutputTokens", request.max_output_tokens}}}};
    HttpRequest http;
    http.url = spec_.base_url + "/models/" + model_name_of(request.model_id) + ":generateContent";
    http.headers = {{"x-goog-api-key", api_key_}};
    http.body = body.dump();
    return http;
  }

  ChatResponse parse(const json& body) const override {
    ChatResponse out;
    const auto& candidate = body.at("candidates").at(0);
    if (auto content = candidate.find("content"); content != candidate.end()) {
      for (const auto& part : content->value("parts", json::array())) out.text += part.value("text", "");
    }
    if (auto usage = body.find("usageMetadata"); usage != body.end()) {
      out.input_tokens = usage->value("promptTokenCount", std::int64_t{0});
      out.output_tokens = usage->value("candidatesTokenCount", std::int64_t{0});
    }
    auto finish = candidate.value("finishReason", std::string{});
    out.provider_meta["finish_reason"] = finish;
    out.provider_meta["truncated"] = finish == "MAX_TOKENS";
    return out;
  }
};

}  // namespace

std::unique_ptr<Provider> make_http_provider(const ProviderSpec& spec, std::string api_key, HttpTransport& transport) {
  switch (spec.family) {
    case ProviderFamily::kOpenAiCompatible:
      return std::make_unique<OpenAiCompatibleProvider>(spec, std::move(api_key), transport);
    case ProviderFamily::kAnthropic:
      return std::make_unique<AnthropicProvider>(spec, std::move(api_key), transport);
    case ProviderFamily::kGemini:
      return std::make_unique<GeminiProvider>(spec, std::move(api_key), transport);
  }
  throw Error(ErrorCode::kUnknownModel, "unsupported provider family", spec.name);
}

}  // namespace faultloom::llm
