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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "faultloom/llm/chat.hpp"

namespace faultloom::llm {

struct TranscriptEntry {
  std::string request_digest;
  ChatResponse response;
};

// Recorded model responses keyed by request digest. Thread-safe. When bound
// to a file, every new entry is appended to it as one JSON line.
class Transcript {
 public:
  Transcript() = default;
  Transcript(const Transcript&) = delete;
  Transcript& operator=(const Transcript&) = delete;

  // Reads an existing transcript file (rejects duplicate digests).
  static std::shared_ptr<Transcript> load(const std::filesystem::path& path);
  // Loads `path` if it exists and appends future entries to it.
  static std::shared_ptr<Transcript> open_for_recording(const std::filesystem::path& path);
  static std::shared_ptr<Transcript> parse(std::string_view contents);

  std::optional<ChatResponse> find(const std::string& digest) const;
  // Returns false (and writes nothing) when the digest is already present.
  bool append(const std::string& digest, const ChatResponse& response);

  std::vector<TranscriptEntry> entries() const;
  std::size_t size() const;
  // Entries in insertion order, one JSON line each.
  std::string serialize() const;

 private:
  void insert_locked(TranscriptEntry entry);

  mutable std::mutex mu_;
  std::vector<TranscriptEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::filesystem::path> sink_;
};

}  // namespace faultloom::llm
