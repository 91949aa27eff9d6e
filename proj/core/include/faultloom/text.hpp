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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Small ASCII-oriented string helpers shared across modules.
namespace faultloom::text {

inline bool is_alnum(char c) noexcept {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline char to_lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lower(std::string_view s);
std::string_view trim(std::string_view s);
// Trims and collapses whitespace runs to one space.
std::string collapse_whitespace(std::string_view s);
// collapse_whitespace, then lowercase.
std::string normalize_label(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split_lines(std::string_view s);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Reads a one-item-per-line list, skipping blank lines and '#' comments.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

}  // namespace faultloom::text
