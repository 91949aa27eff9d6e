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
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace faultloom::llm {

struct ChatRequest {
  std::string model_id;  // "<provider>/<model>", e.g. "openai/gpt-4o"
  std::string system_text;
  std::string user_text;
  double temperature = 0.0;
  int max_output_tokens = 1024;
};

// Throws Error(kInvalidArgument) on empty texts, negative temperature or a
// non-positive token limit.
void validate(const ChatRequest& request);

nlohmann::json to_json(const ChatRequest& request);
ChatRequest chat_request_from_json(const nlohmann::json& doc);

// Compact JSON with sorted keys. Two requests share a canonical form iff all
// semantic fields are equal.
std::string canonical_form(const ChatRequest& request);
// SHA-256 hex of canonical_form().
std::string request_digest(const ChatRequest& request);
// Digest of a serialized request, independent of key order and whitespace.
std::string request_digest_of_serialized(std::string_view serialized);

struct ChatResponse {
  std::string text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t latency_ms = 0;
  nlohmann::json provider_meta = nlohmann::json::object();

  bool operator==(const ChatResponse&) const = default;
};

nlohmann::json to_json(const ChatResponse& response);
ChatResponse chat_response_from_json(const nlohmann::json& doc);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct Usage {
  std::int64_t calls = 0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t latency_ms = 0;

  void add(const ChatResponse& response);
  Usage& operator+=(const Usage& other);
  bool operator==(const Usage&) const = default;
};

nlohmann::json to_json(const Usage& usage);
Usage usage_from_json(const nlohmann::json& doc);

// What a stage needs to talk to a model: the client and the model to address.
struct LlmHandle {
  ChatClient* client = nullptr;
  std::string model_id;
  int max_output_tokens = 1024;

  ChatRequest make_request(std::string system_text, std::string user_text) const;
};

}  // namespace faultloom::llm
