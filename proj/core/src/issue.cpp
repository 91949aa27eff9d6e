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

#include "faultloom/issue.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <functional>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"

namespace faultloom {

using nlohmann::json;

std::string IssueKey::to_string() const { return repo + "#" + std::to_string(number); }

IssueKey IssueKey::parse(std::string_view text) {
  auto hash = text.rfind('#');
  IssueKey key;
  if (hash == std::string_view::npos || hash == 0) {
    throw Error(ErrorCode::kInvalidArgument, "issue key must look like owner/name#123", std::string(text));
  }
  key.repo = std::string(text.substr(0, hash));
  auto slash = key.repo.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == key.repo.size() ||
      key.repo.find('/', slash + 1) != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "issue key must look like owner/name#123", std::string(text));
  }
  auto digits = text.substr(hash + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), key.number);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || key.number <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "issue key must look like owner/name#123", std::string(text));
  }
  return key;
}

std::size_t IssueKeyHash::operator()(const IssueKey& key) const noexcept {
  return std::hash<std::string>{}(key.repo) * 31u + std::hash<std::int64_t>{}(key.number);
}

void validate(const IssueRecord& r) {
  const auto key = r.key().to_string();
  auto slash = r.repo.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == r.repo.size() ||
      r.repo.find('/', slash + 1) != std::string::npos) {
    throw Error(ErrorCode::kMalformedRecord, "repo must be 'owner/name', got '" + r.repo + "'", key);
  }
  if (r.number <= 0) throw Error(ErrorCode::kMalformedRecord, "issue number must be positive", key);
  if (r.created_at > r.updated_at) {
    throw Error(ErrorCode::kTimestampOrder, key + ": created_at is after updated_at", key);
  }
  if ((r.state == IssueState::kClosed) != r.closed_at.has_value()) {
    throw Error(ErrorCode::kMalformedRecord, key + ": closed_at must be present exactly when state is closed", key);
  }
  if (!std::is_sorted(r.comments.begin(), r.comments.end(),
                      [](const IssueComment& a, const IssueComment& b) { return a.created_at < b.created_at; })) {
    throw Error(ErrorCode::kTimestampOrder, key + ": comments are not ordered by created_at", key);
  }
}

json to_json(const IssueRecord& r) {
  json comments = json::array();
  for (const auto& c : r.comments) {
    comments.push_back({{"author_role", c.author_role}, {"created_at", format_rfc3339(c.created_at)}, {"body", c.body}});
  }
  return json{{"repo", r.repo},
              {"number", r.number},
              {"title", r.title},
              {"state", r.state == IssueState::kClosed ? "closed" : "open"},
              {"created_at", format_rfc3339(r.created_at)},
              {"updated_at", format_rfc3339(r.updated_at)},
              {"closed_at", r.closed_at ? json(format_rfc3339(*r.closed_at)) : json(nullptr)},
              {"body", r.body},
              {"labels", r.labels},
              {"comments", std::move(comments)},
              {"is_pull_request", r.is_pull_request},
              {"url", r.url}};
}

namespace {

constexpr std::array<std::string_view, 12> kRecordFields = {
    "repo", "number", "title", "state", "created_at", "updated_at", "closed_at",
    "body", "labels", "comments", "is_pull_request", "url"};
constexpr std::array<std::string_view, 3> kCommentFields = {"author_role", "created_at", "body"};

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformedRecord, what); }

template <std::size_t N>
void check_exact_fields(const json& doc, const std::array<std::string_view, N>& fields, const char* what) {
  if (!doc.is_object()) malformed(std::string(what) + " must be an object");
  for (auto f : fields) {
    if (!doc.contains(f)) malformed(std::string(what) + " is missing field '" + std::string(f) + "'");
  }
  for (const auto& [k, _] : doc.items()) {
    if (std::find(fields.begin(), fields.end(), k) == fields.end()) {
      malformed(std::string(what) + " has unexpected field '" + k + "'");
    }
  }
}

std::string get_string(const json& doc, const char* field) {
  const auto& v = doc.at(field);
  if (!v.is_string()) malformed(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

IssueRecord issue_from_json(const json& doc) {
  check_exact_fields(doc, kRecordFields, "record");
  IssueRecord r;
  r.repo = get_string(doc, "repo");
  if (!doc.at("number").is_number_integer()) malformed("field 'number' must be an integer");
  r.number = doc.at("number").get<std::int64_t>();
  r.title = get_string(doc, "title");
  auto state = get_string(doc, "state");
  if (state == "open") {
    r.state = IssueState::kOpen;
  } else if (state == "closed") {
    r.state = IssueState::kClosed;
  } else {
    malformed("field 'state' must be 'open' or 'closed'");
  }
  r.created_at = parse_rfc3339(get_string(doc, "created_at"));
  r.updated_at = parse_rfc3339(get_string(doc, "updated_at"));
  if (!doc.at("closed_at").is_null()) r.closed_at = parse_rfc3339(get_string(doc, "closed_at"));
  r.body = get_string(doc, "body");
  const auto& labels = doc.at("labels");
  if (!labels.is_array()) malformed("field 'labels' must be a list");
  for (const auto& l : labels) {
    if (!l.is_string()) malformed("labels must be strings");
    r.labels.push_back(l.get<std::string>());
  }
  const auto& comments = doc.at("comments");
  if (!comments.is_array()) malformed("field 'comments' must be a list");
  for (const auto& c : comments) {
    check_exact_fields(c, kCommentFields, "comment");
    r.comments.push_back({get_string(c, "author_role"), parse_rfc3339(get_string(c, "created_at")),
                          get_string(c, "body")});
  }
  if (!doc.at("is_pull_request").is_boolean()) malformed("field 'is_pull_request' must be a boolean");
  r.is_pull_request = doc.at("is_pull_request").get<bool>();
  r.url = get_string(doc, "url");
  return r;
}

}  // namespace faultloom
