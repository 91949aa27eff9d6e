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

#include "faultloom/llm/chat.hpp"

#include "faultloom/error.hpp"
#include "faultloom/hashing.hpp"

namespace faultloom::llm {

using nlohmann::json;

void validate(const ChatRequest& r) {
  if (r.model_id.empty()) throw Error(ErrorCode::kInvalidArgument, "chat request has no model id");
  if (r.system_text.empty() || r.user_text.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "chat request needs non-empty system and user text", r.model_id);
  }
  if (!(r.temperature >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0", r.model_id);
  if (r.max_output_tokens <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_output_tokens must be positive", r.model_id);
  }
}

json to_json(const ChatRequest& r) {
  return json{{"model_id", r.model_id},
              {"system_text", r.system_text},
              {"user_text", r.user_text},
              {"temperature", r.temperature},
              {"max_output_tokens", r.max_output_tokens}};
}

ChatRequest chat_request_from_json(const json& doc) {
  try {
    ChatRequest r;
    r.model_id = doc.at("model_id").get<std::string>();
    r.system_text = doc.at("system_text").get<std::string>();
    r.user_text = doc.at("user_text").get<std::string>();
    r.temperature = doc.value("temperature", 0.0);
    r.max_output_tokens = doc.value("max_output_tokens", 1024);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("bad chat request: ") + e.what());
  }
}

std::string canonical_form(const ChatRequest& request) {
  // nlohmann::json objects are key-sorted, and dump() without indent is compact.
  return to_json(request).dump();
}

std::string request_digest(const ChatRequest& request) { return sha256_hex(canonical_form(request)); }

std::string request_digest_of_serialized(std::string_view serialized) {
  json doc;
  try {
    doc = json::parse(serialized);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("bad chat request: ") + e.what());
  }
  return request_digest(chat_request_from_json(doc));
}

json to_json(const ChatResponse& r) {
  return json{{"text", r.text},
              {"input_tokens", r.input_tokens},
              {"output_tokens", r.output_tokens},
              {"latency_ms", r.latency_ms},
              {"provider_meta", r.provider_meta}};
}

ChatResponse chat_response_from_json(const json& doc) {
  try {
    ChatResponse r;
    r.text = doc.at("text").get<std::string>();
    r.input_tokens = doc.value("input_tokens", std::int64_t{0});
    r.output_tokens = doc.value("output_tokens", std::int64_t{0});
    r.latency_ms = doc.value("latency_ms", std::int64_t{0});
    r.provider_meta = doc.value("provider_meta", json::object());
    if (r.input_tokens < 0 || r.output_tokens < 0) {
      throw Error(ErrorCode::kMalformedDocument, "token counts must be non-negative");
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("bad chat response: ") + e.what());
  }
}

void Usage::add(const ChatResponse& response) {
  ++calls;
  input_tokens += response.input_tokens;
  output_tokens += response.output_tokens;
  latency_ms += response.latency_ms;
}

Usage& Usage::operator+=(const Usage& other) {
  calls += other.calls;
  input_tokens += other.input_tokens;
  output_tokens += other.output_tokens;
  latency_ms += other.latency_ms;
  return *this;
}

json to_json(const Usage& u) {
  return json{{"calls", u.calls},
              {"input_tokens", u.input_tokens},
              {"output_tokens", u.output_tokens},
              {"latency_ms", u.latency_ms}};
}

Usage usage_from_json(const json& doc) {
  Usage u;
  u.calls = doc.value("calls", std::int64_t{0});
  u.input_tokens = doc.value("input_tokens", std::int64_t{0});
  u.output_tokens = doc.value("output_tokens", std::int64_t{0});
  u.latency_ms = doc.value("latency_ms", std::int64_t{0});
  return u;
}

ChatRequest LlmHandle::make_request(std::string system_text, std::string user_text) const {
  ChatRequest r;
  r.model_id = model_id;
  r.system_text = std::move(system_text);
  r.user_text = std::move(user_text);
  r.temperature = 0.0;
  r.max_output_tokens = max_output_tokens;
  return r;
}

}  // namespace faultloom::llm
