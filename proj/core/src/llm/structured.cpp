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

#include "faultloom/llm/structured.hpp"

#include "faultloom/error.hpp"

namespace faultloom::llm {

using nlohmann::json;

namespace {

// Index one past the brace closing the object opened at `open`, or npos.
std::size_t matching_brace_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

json extract_structured(std::string_view text, const std::vector<std::string>& expected_fields) {
  for (auto open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
    auto end = matching_brace_end(text, open);
    if (end == std::string_view::npos) continue;
    json candidate = json::parse(text.substr(open, end - open), nullptr, /*allow_exceptions=*/false);
    if (candidate.is_discarded() || !candidate.is_object()) continue;

    std::string missing;
    for (const auto& field : expected_fields) {
      if (candidate.contains(field)) continue;
      if (!missing.empty()) missing += ",";
      missing += field;
    }
    if (!missing.empty()) {
      throw Error(ErrorCode::kMissingField, "structured output lacks field(s): " + missing, missing);
    }
    return candidate;
  }
  throw Error(ErrorCode::kNoStructuredObject, "no well-formed JSON object in model output");
}

}  // namespace faultloom::llm
