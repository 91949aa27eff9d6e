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

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "faultloom/classify.hpp"
#include "faultloom/error.hpp"
#include "faultloom/filter.hpp"
#include "faultloom/http.hpp"
#include "faultloom/rational.hpp"
#include "faultloom/llm/chat.hpp"

namespace faultloom::testing {

std::filesystem::path source_dir();
std::filesystem::path data_dir();
TaxonomyPair fixture_taxonomies();

nlohmann::json read_json(const std::filesystem::path& path);

// Single-field edits of the shipped taxonomy documents, each of which the
// loader must reject with `expected`.
struct TaxonomyMutation {
  std::string name;
  nlohmann::json document;
  ErrorCode expected;
};
std::vector<TaxonomyMutation> taxonomy_mutations();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Serves canned responses per URL (FIFO; the last one repeats) and logs
// every request. Unknown URLs get a 404.
class FixtureTransport final : public HttpTransport {
 public:
  void add(const std::string& url, HttpResponse response);
  void add_json(const std::string& url, const std::string& body, int status = 200,
                std::map<std::string, std::string> headers = {});
  HttpResponse send(const HttpRequest& request) override;

  std::size_t count() const;
  std::vector<HttpRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::deque<HttpResponse>> routes_;
  std::vector<HttpRequest> log_;
};

// Fails the test run if any network request is attempted.
class CountingTransport final : public HttpTransport {
 public:
  HttpResponse send(const HttpRequest& request) override;
  std::size_t count() const { return count_.load(); }

 private:
  std::atomic<std::size_t> count_{0};
};

// Replies through a callback and counts calls per issue key.
class FunctionClient final : public llm::ChatClient {
 public:
  using Fn = std::function<std::string(const llm::ChatRequest&)>;
  explicit FunctionClient(Fn fn) : fn_(std::move(fn)) {}
  llm::ChatResponse complete(const llm::ChatRequest& request) override;

  std::size_t calls() const { return calls_.load(); }
  std::vector<llm::ChatRequest> requests() const;

 private:
  Fn fn_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::vector<llm::ChatRequest> requests_;
};

// Counts calls through another client.
class CountingClient final : public llm::ChatClient {
 public:
  explicit CountingClient(llm::ChatClient& inner) : inner_(inner) {}
  llm::ChatResponse complete(const llm::ChatRequest& request) override;
  std::size_t calls() const { return calls_.load(); }
  std::map<std::string, int> calls_by_issue() const;

 private:
  llm::ChatClient& inner_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::map<std::string, int> by_issue_;
};

// Returns the issue key named in a faultloom prompt, or "".
std::string issue_of(const llm::ChatRequest& request);

IssueRecord make_issue(std::string repo, std::int64_t number, std::string title, std::string body,
                       const std::string& created = "2020-05-01T10:00:00Z", int comments = 1,
                       std::vector<std::string> labels = {});

// Independent reference implementation of the deterministic criteria: a
// plain scan of every occurrence of every term with explicit boundary checks.
struct NaiveVerdict {
  bool vocabulary = false;
  std::string first_term;  // earliest term in vocabulary order that matched
  bool no_exclusion = false;
  bool cutoff = false;
  bool answered = false;
};

bool naive_term_present(const std::string& text, const std::string& term);
NaiveVerdict naive_deterministic(const IssueRecord& issue, const FilterCriteria& criteria);

// Randomized issues mixing vocabulary terms with near misses ("bugs",
// "tf.jsx", "xcrash"), exclusion labels and dates around the cutoff.
struct FilterScenario {
  FilterCriteria criteria;
  std::vector<IssueRecord> issues;
};
FilterScenario random_filter_scenario(std::size_t n, std::uint64_t seed);

// Checks apply_deterministic against naive_deterministic for every issue and
// returns a description of the first disagreement, or "".
std::string first_filter_disagreement(const FilterScenario& scenario);

// Random labelled items for metric property checks. Predictions are drawn
// from the assignable nodes, from non-leaf nodes (which scoring must treat as
// invalid) or left empty.
struct Stage3Case {
  std::vector<FaultLabel> labels;
  GoldSet gold;
};
Stage3Case random_stage3_case(const TaxonomyPair& taxonomies, std::size_t n, std::uint64_t seed);

struct Stage2Case {
  std::vector<FilterDecision> decisions;
  GoldSet gold;
};
Stage2Case random_stage2_case(std::size_t n, std::uint64_t seed);

// Hand-counted metric fixtures. Stage II: 10 decisions, 6 TP, 2 FP, 1 FN,
// 1 TN. Stage III: 4 labels, 3 exact symptom leaves, the miss is Memory Leak
// predicted as Out of Memory.
Stage2Case stage2_fixture();
Stage3Case stage3_fixture(const TaxonomyPair& taxonomies);

// Reference accuracy computed from the dotted id paths alone ("a.b.c" has
// level-2 ancestor "a.b"), independent of the taxonomy object.
Ratio naive_level_accuracy(const Stage3Case& c, const TaxonomyPair& taxonomies, TaxonomyKind kind, int level);

}  // namespace faultloom::testing
