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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace faultloom::llm {

// Finds the first well-formed JSON object in free-form model output. Prose,
// code fences and trailing chatter around the object are ignored.
//
// Throws Error(kNoStructuredObject) when no object parses, and
// Error(kMissingField) naming every absent field from `expected_fields`.
nlohmann::json extract_structured(std::string_view text, const std::vector<std::string>& expected_fields = {});

}  // namespace faultloom::llm
