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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "faultloom/time.hpp"

namespace faultloom {

struct IssueKey {
  std::string repo;  // "owner/name"
  std::int64_t number = 0;

  auto operator<=>(const IssueKey&) const = default;
  bool operator==(const IssueKey&) const = default;

  // "owner/name#123"
  std::string to_string() const;
  static IssueKey parse(std::string_view text);
};

struct IssueKeyHash {
  std::size_t operator()(const IssueKey& key) const noexcept;
};

enum class IssueState { kOpen, kClosed };

struct IssueComment {
  std::string author_role;
  Timestamp created_at;
  std::string body;

  bool operator==(const IssueComment&) const = default;
};

struct IssueRecord {
  std::string repo;
  std::int64_t number = 0;
  std::string title;
  IssueState state = IssueState::kOpen;
  Timestamp created_at;
  Timestamp updated_at;
  std::optional<Timestamp> closed_at;
  std::string body;
  std::vector<std::string> labels;
  std::vector<IssueComment> comments;
  bool is_pull_request = false;
  std::string url;

  IssueKey key() const { return {repo, number}; }
  bool operator==(const IssueRecord&) const = default;
};

// Throws Error(kMalformedRecord | kTimestampOrder) naming the key.
void validate(const IssueRecord& record);

// Exact-field JSON encoding used by dumps and stage artifacts.
nlohmann::json to_json(const IssueRecord& record);
// Rejects missing, extra or mistyped fields. Does not call validate().
IssueRecord issue_from_json(const nlohmann::json& doc);

}  // namespace faultloom
