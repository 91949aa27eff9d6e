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

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faultloom/corpus.hpp"
#include "faultloom/http.hpp"
#include "faultloom/retry.hpp"

namespace faultloom {

// Inclusive range of creation dates.
struct DateWindow {
  Date from;
  Date to;
};

using Clock = std::function<Timestamp()>;
Clock system_clock_seconds();

// Content-addressed page store. A manifest per (repo, window, kind) lists page
// object hashes; pages live once under objects/. Writes for a given key are
// serialized, readers never block.
class ResponseCache {
 public:
  ResponseCache(std::filesystem::path dir, std::chrono::seconds ttl, Clock clock);

  std::optional<std::vector<std::string>> load(const std::string& key) const;
  void store(const std::string& key, const std::vector<std::string>& pages);

  static std::string make_key(std::string_view repo, const DateWindow& window, std::string_view kind);

 private:
  std::filesystem::path dir_;
  std::chrono::seconds ttl_;
  Clock clock_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> key_locks_;
};

struct TrackerOptions {
  std::string api_base = "https://api.github.com";
  std::string token;  // bearer token, usually from FAULTLOOM_VCS_TOKEN
  std::optional<std::filesystem::path> cache_dir;
  std::chrono::seconds cache_ttl{24 * 3600};
  int per_page = 100;
  RetryPolicy retry;
};

// Client for a GitHub-style issue tracker REST API: paginated issue listing
// (following rel="next") plus per-issue comment listing.
class IssueTrackerClient {
 public:
  IssueTrackerClient(HttpTransport& transport, TrackerOptions options, Sleeper sleeper = thread_sleeper(),
                     Clock clock = system_clock_seconds());

  // All non-pull-request issues of `repo` created inside `window`, with full
  // comment lists. Pages are served from the cache while fresh.
  Corpus fetch_issues(std::string_view repo, const DateWindow& window);

  // Fetches several repositories concurrently (at most `max_concurrent` at a
  // time) and merges the results in input order.
  Corpus fetch_many(const std::vector<std::string>& repos, const DateWindow& window, int max_concurrent);

 private:
  std::vector<std::string> fetch_pages(const std::string& first_url, const std::function<bool(const std::string&)>& stop_after);
  HttpResponse get(const std::string& url);

  HttpTransport& transport_;
  TrackerOptions options_;
  Sleeper sleeper_;
  Clock clock_;
  std::unique_ptr<ResponseCache> cache_;
};

}  // namespace faultloom
