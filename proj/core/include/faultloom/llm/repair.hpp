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

#include <optional>
#include <string>
#include <utility>

#include "faultloom/error.hpp"
#include "faultloom/llm/chat.hpp"

namespace faultloom::llm {

inline constexpr int kDefaultRepairBudget = 2;

template <class T>
struct RepairOutcome {
  std::optional<T> value;
  int attempts = 0;
  std::string last_raw;
  std::string last_error;
  Usage usage;
};

// The follow-up user text sent after an unusable reply.
inline std::string repair_user_text(const std::string& original, const std::string& problem) {
  return original + "\n\nYour previous reply could not be used: " + problem +
         "\nReply again with only the JSON object described above.";
}

// Calls the model, hands the raw text to `interpret`, and on an interpretation
// failure (a faultloom::Error thrown by `interpret`) re-asks with the failure
// appended, at most `max_repairs` more times. Provider errors propagate.
template <class Interpret>
auto complete_with_repair(ChatClient& client, const ChatRequest& base, int max_repairs, Interpret&& interpret)
    -> RepairOutcome<decltype(interpret(std::string{}))> {
  using T = decltype(interpret(std::string{}));
  RepairOutcome<T> outcome;
  ChatRequest request = base;
  for (int attempt = 0; attempt <= max_repairs; ++attempt) {
    auto response = client.complete(request);
    outcome.usage.add(response);
    outcome.attempts = attempt + 1;
    outcome.last_raw = response.text;
    try {
      outcome.value.emplace(interpret(response.text));
      outcome.last_error.clear();
      return outcome;
    } catch (const Error& e) {
      outcome.last_error = e.what();
    }
    request = base;
    request.user_text = repair_user_text(base.user_text, outcome.last_error);
  }
  return outcome;
}

}  // namespace faultloom::llm
