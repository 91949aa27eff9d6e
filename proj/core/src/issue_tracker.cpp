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

#include "faultloom/issue_tracker.hpp"

#include <algorithm>
#include <future>
#include <semaphore>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"
#include "faultloom/hashing.hpp"
#include "faultloom/text.hpp"

namespace faultloom {

using nlohmann::json;
namespace fs = std::filesystem;

Clock system_clock_seconds() {
  return [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
}

ResponseCache::ResponseCache(fs::path dir, std::chrono::seconds ttl, Clock clock)
    : dir_(std::move(dir)), ttl_(ttl), clock_(std::move(clock)) {}

std::string ResponseCache::make_key(std::string_view repo, const DateWindow& window, std::string_view kind) {
  return std::string(repo) + "|" + format_date(window.from) + ".." + format_date(window.to) + "|" + std::string(kind);
}

std::optional<std::vector<std::string>> ResponseCache::load(const std::string& key) const {
  const auto manifest_path = dir_ / "manifests" / (sha256_hex(key) + ".json");
  std::error_code ec;
  if (!fs::exists(manifest_path, ec)) return std::nullopt;
  try {
    auto manifest = json::parse(text::read_file(manifest_path));
    if (manifest.at("key").get<std::string>() != key) return std::nullopt;
    auto fetched_at = parse_rfc3339(manifest.at("fetched_at").get<std::string>());
    if (clock_() - fetched_at >= ttl_) return std::nullopt;
    std::vector<std::string> pages;
    for (const auto& h : manifest.at("pages")) {
      auto body = text::read_file(dir_ / "objects" / (h.get<std::string>() + ".json"));
      if (sha256_hex(body) != h.get<std::string>()) return std::nullopt;
      pages.push_back(std::move(body));
    }
    return pages;
  } catch (const std::exception&) {
    // Unreadable or partially written entries count as misses.
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const std::vector<std::string>& pages) {
  std::shared_ptr<std::mutex> key_lock;
  {
    std::lock_guard guard(locks_mu_);
    auto& slot = key_locks_[key];
    if (!slot) slot = std::make_shared<std::mutex>();
    key_lock = slot;
  }
  std::lock_guard writer(*key_lock);
  json manifest{{"key", key}, {"fetched_at", format_rfc3339(clock_())}, {"pages", json::array()}};
  for (const auto& body : pages) {
    auto hash = sha256_hex(body);
    auto object = dir_ / "objects" / (hash + ".json");
    std::error_code ec;
    if (!fs::exists(object, ec)) text::write_file_atomic(object, body);
    manifest["pages"].push_back(hash);
  }
  text::write_file_atomic(dir_ / "manifests" / (sha256_hex(key) + ".json"), manifest.dump(2));
}

IssueTrackerClient::IssueTrackerClient(HttpTransport& transport, TrackerOptions options, Sleeper sleeper,
                                       Clock clock)
    : transport_(transport), options_(std::move(options)), sleeper_(std::move(sleeper)), clock_(std::move(clock)) {
  if (options_.cache_dir) cache_ = std::make_unique<ResponseCache>(*options_.cache_dir, options_.cache_ttl, clock_);
}

HttpResponse IssueTrackerClient::get(const std::string& url) {
  HttpRequest request;
  request.url = url;
  request.headers = {{"Accept", "application/vnd.github+json"}, {"User-Agent", "faultloom"}};
  if (!options_.token.empty()) request.headers.emplace_back("Authorization", "Bearer " + options_.token);

  Backoff backoff(options_.retry, fresh_seed());
  std::string last_failure;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (attempt > 1) sleeper_(backoff.delay_after(attempt - 1));
    HttpResponse response;
    try {
      response = transport_.send(request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNetwork) throw;
      last_failure = e.what();
      continue;
    }
    if (response.status >= 200 && response.status < 300) return response;

    const auto* remaining = response.header("x-ratelimit-remaining");
    if ((response.status == 403 || response.status == 429) && remaining != nullptr && *remaining == "0") {
      std::string reset = "unknown";
      if (const auto* r = response.header("x-ratelimit-reset")) {
        try {
          reset = format_rfc3339(Timestamp{std::chrono::seconds{std::stoll(*r)}});
        } catch (const std::exception&) {
        }
      }
      throw Error(ErrorCode::kRateLimited, "rate limit exhausted for " + url + "; resets at " + reset, reset);
    }
    if (response.status == 401 || response.status == 403) {
      throw Error(ErrorCode::kAuth, "HTTP " + std::to_string(response.status) + " from " + url, url);
    }
    if (response.status != 429 && response.status < 500) {
      throw Error(ErrorCode::kNetwork, "HTTP " + std::to_string(response.status) + " from " + url, url);
    }
    last_failure = "HTTP " + std::to_string(response.status);
  }
  throw Error(ErrorCode::kNetwork,
              "giving up on " + url + " after " + std::to_string(options_.retry.max_attempts) +
                  " attempts: " + last_failure,
              url);
}

std::vector<std::string> IssueTrackerClient::fetch_pages(const std::string& first_url,
                                                         const std::function<bool(const std::string&)>& stop_after) {
  std::vector<std::string> pages;
  std::string url = first_url;
  while (!url.empty()) {
    auto response = get(url);
    pages.push_back(response.body);
    if (stop_after && stop_after(response.body)) break;
    url.clear();
    if (const auto* link = response.header("link")) {
      auto links = parse_link_header(*link);
      if (auto it = links.find("next"); it != links.end()) url = it->second;
    }
  }
  return pages;
}

namespace {

std::string string_or_empty(const json& obj, const char* field) {
  auto it = obj.find(field);
  return (it == obj.end() || it->is_null()) ? std::string{} : it->get<std::string>();
}

json parse_page(const std::string& body, const std::string& where) {
  try {
    auto page = json::parse(body);
    if (!page.is_array()) throw Error(ErrorCode::kNetwork, where + ": expected a JSON array page", where);
    return page;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kNetwork, where + ": unparseable page: " + e.what(), where);
  }
}

}  // namespace

Corpus IssueTrackerClient::fetch_issues(std::string_view repo, const DateWindow& window) {
  const std::string repo_s(repo);
  const auto fetched_at = clock_();
  auto cached_or_fetch = [&](const std::string& kind, const std::string& url,
                             const std::function<bool(const std::string&)>& stop_after) {
    const auto key = ResponseCache::make_key(repo_s, window, kind);
    if (cache_) {
      if (auto hit = cache_->load(key)) return *hit;
    }
    auto pages = fetch_pages(url, stop_after);
    if (cache_) cache_->store(key, pages);
    return pages;
  };

  const auto base = options_.api_base + "/repos/" + repo_s;
  const auto list_url = base + "/issues?state=all&sort=created&direction=asc&per_page=" +
                        std::to_string(options_.per_page) + "&since=" + format_date(window.from) + "T00:00:00Z";
  // Listing is in ascending creation order, so a page ending past the window is the last one needed.
  auto past_window = [&](const std::string& body) {
    auto page = parse_page(body, list_url);
    return !page.empty() && date_of(parse_rfc3339(page.back().at("created_at").get<std::string>())) > window.to;
  };

  std::vector<IssueRecord> records;
  for (const auto& body : cached_or_fetch("issues", list_url, past_window)) {
    for (const auto& item : parse_page(body, list_url)) {
      if (item.contains("pull_request")) continue;
      IssueRecord r;
      r.repo = repo_s;
      r.number = item.at("number").get<std::int64_t>();
      r.created_at = parse_rfc3339(item.at("created_at").get<std::string>());
      if (date_of(r.created_at) < window.from || date_of(r.created_at) > window.to) continue;
      r.title = string_or_empty(item, "title");
      r.state = string_or_empty(item, "state") == "closed" ? IssueState::kClosed : IssueState::kOpen;
      r.updated_at = parse_rfc3339(item.at("updated_at").get<std::string>());
      if (auto closed = string_or_empty(item, "closed_at"); !closed.empty()) r.closed_at = parse_rfc3339(closed);
      if (r.state == IssueState::kOpen) r.closed_at.reset();
      if (r.state == IssueState::kClosed && !r.closed_at) r.closed_at = r.updated_at;
      r.body = string_or_empty(item, "body");
      if (auto labels = item.find("labels"); labels != item.end() && labels->is_array()) {
        for (const auto& l : *labels) r.labels.push_back(l.is_string() ? l.get<std::string>() : string_or_empty(l, "name"));
      }
      r.url = string_or_empty(item, "html_url");
      r.is_pull_request = false;

      auto comment_count = item.value("comments", 0);
      if (comment_count > 0) {
        auto comments_url = string_or_empty(item, "comments_url");
        if (comments_url.empty()) comments_url = base + "/issues/" + std::to_string(r.number) + "/comments";
        comments_url += "?per_page=" + std::to_string(options_.per_page);
        for (const auto& cbody : cached_or_fetch("comments#" + std::to_string(r.number), comments_url, {})) {
          for (const auto& c : parse_page(cbody, comments_url)) {
            r.comments.push_back({string_or_empty(c, "author_association"),
                                  parse_rfc3339(c.at("created_at").get<std::string>()), string_or_empty(c, "body")});
          }
        }
        std::stable_sort(r.comments.begin(), r.comments.end(),
                         [](const IssueComment& a, const IssueComment& b) { return a.created_at < b.created_at; });
      }
      records.push_back(std::move(r));
    }
  }
  return Corpus(std::move(records), {CorpusSource::kLive, fetched_at});
}

Corpus IssueTrackerClient::fetch_many(const std::vector<std::string>& repos, const DateWindow& window,
                                      int max_concurrent) {
  if (max_concurrent < 1) throw Error(ErrorCode::kInvalidArgument, "max_concurrent must be >= 1");
  std::counting_semaphore<> slots(max_concurrent);
  std::vector<std::future<Corpus>> pending;
  for (const auto& repo : repos) {
    pending.push_back(std::async(std::launch::async, [&, repo] {
      slots.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{slots};
      return fetch_issues(repo, window);
    }));
  }
  std::vector<Corpus> parts;
  for (auto& f : pending) parts.push_back(f.get());
  return merge(parts);
}

}  // namespace faultloom
