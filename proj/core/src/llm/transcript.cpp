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

#include "faultloom/llm/transcript.hpp"

#include <fstream>

#include "faultloom/error.hpp"
#include "faultloom/text.hpp"

namespace faultloom::llm {

using nlohmann::json;

namespace {
std::string entry_line(const TranscriptEntry& e) {
  return json{{"request_digest", e.request_digest}, {"response", to_json(e.response)}}.dump() + "\n";
}
}  // namespace

std::shared_ptr<Transcript> Transcript::parse(std::string_view contents) {
  auto t = std::make_shared<Transcript>();
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(contents)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("request_digest") || !doc.contains("response")) {
      throw Error(ErrorCode::kMalformedDocument, "transcript line " + std::to_string(line_no) + " is malformed",
                  "line " + std::to_string(line_no));
    }
    TranscriptEntry entry{doc.at("request_digest").get<std::string>(), chat_response_from_json(doc.at("response"))};
    if (t->index_.count(entry.request_digest) != 0) {
      throw Error(ErrorCode::kDuplicateKey,
                  "transcript line " + std::to_string(line_no) + " repeats digest " + entry.request_digest,
                  entry.request_digest);
    }
    t->insert_locked(std::move(entry));
  }
  return t;
}

std::shared_ptr<Transcript> Transcript::load(const std::filesystem::path& path) {
  return parse(text::read_file(path));
}

std::shared_ptr<Transcript> Transcript::open_for_recording(const std::filesystem::path& path) {
  std::error_code ec;
  auto t = std::filesystem::exists(path, ec) ? load(path) : std::make_shared<Transcript>();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  t->sink_ = path;
  return t;
}

void Transcript::insert_locked(TranscriptEntry entry) {
  index_.emplace(entry.request_digest, entries_.size());
  entries_.push_back(std::move(entry));
}

std::optional<ChatResponse> Transcript::find(const std::string& digest) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(digest);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].response;
}

bool Transcript::append(const std::string& digest, const ChatResponse& response) {
  std::lock_guard lock(mu_);
  if (index_.count(digest) != 0) return false;
  TranscriptEntry entry{digest, response};
  if (sink_) {
    std::ofstream out(*sink_, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::kIo, "cannot append to transcript " + sink_->string(), sink_->string());
    out << entry_line(entry);
  }
  insert_locked(std::move(entry));
  return true;
}

std::vector<TranscriptEntry> Transcript::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string Transcript::serialize() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& e : entries_) out += entry_line(e);
  return out;
}

}  // namespace faultloom::llm
