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

#include "support.hpp"

#include <unistd.h>

#include <random>

#include "faultloom/error.hpp"
#include "faultloom/sampling.hpp"
#include "faultloom/text.hpp"
#include "faultloom/time.hpp"

namespace faultloom::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return FAULTLOOM_SOURCE_DIR; }
fs::path data_dir() { return source_dir() / "data"; }

TaxonomyPair fixture_taxonomies() {
  return {load_taxonomy_file(data_dir() / "taxonomies" / "symptom.json"),
          load_taxonomy_file(data_dir() / "taxonomies" / "root_cause.json")};
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(text::read_file(path)); }

std::vector<TaxonomyMutation> taxonomy_mutations() {
  const auto symptom = read_json(data_dir() / "taxonomies" / "symptom.json");
  const auto cause = read_json(data_dir() / "taxonomies" / "root_cause.json");
  std::vector<TaxonomyMutation> out;
  auto add = [&](std::string name, const nlohmann::json& base, ErrorCode code, auto edit) {
    auto doc = base;
    edit(doc);
    out.push_back({std::move(name), std::move(doc), code});
  };
  using J = nlohmann::json;
  add("empty root id", symptom, ErrorCode::kMalformedDocument, [](J& d) { d["roots"][0]["id"] = ""; });
  add("missing root id", symptom, ErrorCode::kMalformedDocument, [](J& d) { d["roots"][0].erase("id"); });
  add("empty root name", symptom, ErrorCode::kMalformedDocument, [](J& d) { d["roots"][0]["name"] = ""; });
  add("empty root definition", symptom, ErrorCode::kMissingDefinition, [](J& d) { d["roots"][0]["definition"] = ""; });
  add("blank subcategory definition", symptom, ErrorCode::kMissingDefinition,
      [](J& d) { d["roots"][0]["children"][0]["definition"] = "  \n "; });
  add("missing leaf definition", symptom, ErrorCode::kMissingDefinition,
      [](J& d) { d["roots"][0]["children"][0]["children"][0].erase("definition"); });
  add("root id reused by another root", symptom, ErrorCode::kDuplicateId,
      [](J& d) { d["roots"][1]["id"] = d["roots"][0]["id"]; });
  add("leaf id reused across branches", symptom, ErrorCode::kDuplicateId, [](J& d) {
    d["roots"][1]["children"][0]["children"][0]["id"] = d["roots"][0]["children"][0]["children"][0]["id"];
  });
  add("root name repeated", symptom, ErrorCode::kDuplicateName, [](J& d) { d["roots"][1]["name"] = d["roots"][0]["name"]; });
  add("sibling name repeated modulo case", symptom, ErrorCode::kDuplicateName, [](J& d) {
    d["roots"][0]["children"][1]["name"] = "  reference   ERROR";
  });
  add("level-4 node", symptom, ErrorCode::kLevelViolation, [](J& d) {
    d["roots"][0]["children"][0]["children"][0]["children"] =
        J::array({{{"id", "deep"}, {"name", "Deep"}, {"definition", "Too deep."}, {"children", J::array()}}});
  });
  add("root declared at level 2", symptom, ErrorCode::kLevelViolation, [](J& d) { d["roots"][0]["level"] = 2; });
  add("subcategory declared at level 3", symptom, ErrorCode::kLevelViolation,
      [](J& d) { d["roots"][0]["children"][0]["level"] = 3; });
  add("child repeats its parent's id", symptom, ErrorCode::kCycle,
      [](J& d) { d["roots"][0]["children"][0]["id"] = d["roots"][0]["id"]; });
  add("leaf repeats its root's id", symptom, ErrorCode::kCycle,
      [](J& d) { d["roots"][0]["children"][0]["children"][1]["id"] = d["roots"][0]["id"]; });
  add("unknown kind", symptom, ErrorCode::kMalformedDocument, [](J& d) { d["kind"] = "symptoms"; });
  add("roots not a list", symptom, ErrorCode::kMalformedDocument, [](J& d) { d["roots"] = J::object(); });
  add("children not a list", symptom, ErrorCode::kMalformedDocument, [](J& d) { d["roots"][0]["children"] = "none"; });
  add("root cause below its leaf level", cause, ErrorCode::kLevelViolation, [](J& d) {
    d["roots"][0]["children"][0]["children"] =
        J::array({{{"id", "x"}, {"name", "Sub-subcategory"}, {"definition", "Not allowed."}, {"children", J::array()}}});
  });
  add("leaf level out of range", cause, ErrorCode::kLevelViolation, [](J& d) { d["leaf_level"] = 4; });
  return out;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("faultloom-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
           std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void FixtureTransport::add(const std::string& url, HttpResponse response) {
  std::lock_guard lock(mu_);
  routes_[url].push_back(std::move(response));
}

void FixtureTransport::add_json(const std::string& url, const std::string& body, int status,
                                std::map<std::string, std::string> headers) {
  headers.emplace("content-type", "application/json");
  add(url, HttpResponse{status, std::move(headers), body});
}

HttpResponse FixtureTransport::send(const HttpRequest& request) {
  std::lock_guard lock(mu_);
  log_.push_back(request);
  auto it = routes_.find(request.url);
  if (it == routes_.end() || it->second.empty()) return HttpResponse{404, {}, "{\"message\":\"Not Found\"}"};
  auto r = it->second.front();
  if (it->second.size() > 1) it->second.pop_front();
  return r;
}

std::size_t FixtureTransport::count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

std::vector<HttpRequest> FixtureTransport::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

HttpResponse CountingTransport::send(const HttpRequest& request) {
  ++count_;
  throw Error(ErrorCode::kNetwork, "network access attempted: " + request.url, request.url);
}

std::string issue_of(const llm::ChatRequest& request) {
  static const std::string marker = "\nIssue: ";
  auto pos = request.user_text.find(marker);
  if (pos == std::string::npos) return "";
  pos += marker.size();
  return request.user_text.substr(pos, request.user_text.find('\n', pos) - pos);
}

llm::ChatResponse FunctionClient::complete(const llm::ChatRequest& request) {
  ++calls_;
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
  }
  llm::ChatResponse r;
  r.text = fn_(request);
  r.input_tokens = static_cast<std::int64_t>(request.user_text.size() / 4);
  r.output_tokens = static_cast<std::int64_t>(r.text.size() / 4);
  r.latency_ms = 10;
  return r;
}

std::vector<llm::ChatRequest> FunctionClient::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

llm::ChatResponse CountingClient::complete(const llm::ChatRequest& request) {
  ++calls_;
  {
    std::lock_guard lock(mu_);
    ++by_issue_[issue_of(request)];
  }
  return inner_.complete(request);
}

std::map<std::string, int> CountingClient::calls_by_issue() const {
  std::lock_guard lock(mu_);
  return by_issue_;
}

IssueRecord make_issue(std::string repo, std::int64_t number, std::string title, std::string body,
                       const std::string& created, int comments, std::vector<std::string> labels) {
  IssueRecord r;
  r.repo = std::move(repo);
  r.number = number;
  r.title = std::move(title);
  r.body = std::move(body);
  r.created_at = parse_rfc3339(created);
  r.updated_at = r.created_at;
  r.labels = std::move(labels);
  for (int i = 0; i < comments; ++i) {
    r.updated_at += std::chrono::hours(1);
    r.comments.push_back({"MEMBER", r.updated_at, "reply " + std::to_string(i)});
  }
  r.url = "https://github.com/" + r.repo + "/issues/" + std::to_string(r.number);
  return r;
}

namespace {

bool alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

std::string ascii_lower(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

}  // namespace

bool naive_term_present(const std::string& text, const std::string& term) {
  const auto t = ascii_lower(text);
  const auto w = ascii_lower(term);
  if (w.empty() || w.size() > t.size()) return false;
  for (std::size_t i = 0; i + w.size() <= t.size(); ++i) {
    bool same = true;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (t[i + j] != w[j]) {
        same = false;
        break;
      }
    }
    if (!same) continue;
    const bool left_ok = i == 0 || !alnum(t[i - 1]);
    const bool right_ok = i + w.size() == t.size() || !alnum(t[i + w.size()]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

NaiveVerdict naive_deterministic(const IssueRecord& issue, const FilterCriteria& criteria) {
  NaiveVerdict v;
  std::vector<std::string> texts{issue.title, issue.body};
  for (const auto& c : issue.comments) texts.push_back(c.body);
  for (const auto& term : criteria.vocabulary) {
    for (const auto& t : texts) {
      if (naive_term_present(t, term)) {
        v.vocabulary = true;
        v.first_term = term;
        break;
      }
    }
    if (v.vocabulary) break;
  }
  v.no_exclusion = true;
  for (const auto& l : issue.labels) {
    for (const auto& x : criteria.exclusion_labels) {
      if (ascii_lower(l) == ascii_lower(x)) v.no_exclusion = false;
    }
  }
  v.cutoff = date_of(issue.created_at) >= criteria.cutoff_date;
  v.answered = !issue.comments.empty();
  return v;
}

}  // namespace faultloom::testing

namespace faultloom::testing {

FilterScenario random_filter_scenario(std::size_t n, std::uint64_t seed) {
  FilterScenario s;
  s.criteria.vocabulary = {"crash", "out of memory", "tf.js", "NaN", "404", "c++", "leak"};
  s.criteria.exclusion_labels = {"type:feature", "Question"};
  s.criteria.cutoff_date = parse_date("2018-03-01");
  s.criteria.require_answered = true;

  static const std::vector<std::string> words = {
      "the", "model", "loads", "crash", "crashes", "CRASH", "xcrash", "crash_", "out of memory", "out-of-memory",
      "Out Of Memory!", "tf.js", "TF.JS", "tf.jsx", "@tensorflow/tfjs", "nan", "NaN,", "nano", "banana", "404",
      "4040", "(404)", "c++", "C++11", "leak.", "leaky", "leakage", "when", "I", "call", "predict()", "\n", "é"};
  static const std::vector<std::string> labels = {"type:feature", "TYPE:FEATURE", "question", "type:bug", "stat:awaiting"};
  PortableRng rng(seed);
  auto pick = [&](const std::vector<std::string>& pool) { return pool[rng.below(pool.size())]; };
  auto sentence = [&] {
    std::string out;
    auto len = rng.below(12);
    for (std::uint64_t i = 0; i < len; ++i) {
      auto w = pick(words);
      // glue words together now and then so boundaries are exercised
      out += (rng.below(4) == 0 ? "" : " ") + w;
    }
    return out;
  };
  const auto base = parse_rfc3339("2018-02-25T12:00:00Z");
  for (std::size_t i = 0; i < n; ++i) {
    IssueRecord r;
    r.repo = "o/r";
    r.number = static_cast<std::int64_t>(i + 1);
    r.title = sentence();
    r.body = sentence();
    r.created_at = base + std::chrono::hours(static_cast<long>(rng.below(24 * 10)));
    r.updated_at = r.created_at;
    auto nl = rng.below(3);
    for (std::uint64_t k = 0; k < nl; ++k) r.labels.push_back(pick(labels));
    auto nc = rng.below(3);
    for (std::uint64_t k = 0; k < nc; ++k) {
      r.updated_at += std::chrono::minutes(5);
      r.comments.push_back({"MEMBER", r.updated_at, sentence()});
    }
    r.url = "https://example.test/" + std::to_string(r.number);
    s.issues.push_back(std::move(r));
  }
  return s;
}

std::string first_filter_disagreement(const FilterScenario& scenario) {
  const VocabularyMatcher matcher(scenario.criteria.vocabulary);
  for (const auto& issue : scenario.issues) {
    auto trace = apply_deterministic(issue, scenario.criteria, matcher);
    auto naive = naive_deterministic(issue, scenario.criteria);
    std::vector<bool> expected{naive.vocabulary, naive.no_exclusion, naive.cutoff, naive.answered};
    const auto key = issue.key().to_string();
    if (trace.size() != expected.size()) return key + ": trace has " + std::to_string(trace.size()) + " entries";
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace[i].passed != expected[i]) return key + ": criterion " + std::string(to_string(trace[i].id)) + " differs";
    }
    if (naive.vocabulary && trace[0].evidence != naive.first_term) {
      return key + ": first term '" + trace[0].evidence + "' vs '" + naive.first_term + "'";
    }
  }
  return "";
}

}  // namespace faultloom::testing

namespace faultloom::testing {

Stage3Case random_stage3_case(const TaxonomyPair& taxonomies, std::size_t n, std::uint64_t seed) {
  PortableRng rng(seed);
  const auto s_leaves = taxonomies.symptoms.leaves();
  const auto r_leaves = taxonomies.root_causes.leaves();
  const auto& s_all = taxonomies.symptoms.nodes();
  const auto& r_all = taxonomies.root_causes.nodes();
  auto pick = [&](const auto& pool) { return pool[rng.below(pool.size())]->id; };
  Stage3Case c;
  for (std::size_t i = 0; i < n; ++i) {
    IssueKey key{"o/r", static_cast<std::int64_t>(i + 1)};
    GoldLabel g{key, true, pick(s_leaves), pick(r_leaves)};
    FaultLabel l;
    l.key = key;
    l.attempts = 1;
    switch (rng.below(6)) {
      case 0:  // exact
        l.symptom_leaf = g.symptom_leaf;
        l.root_cause = g.root_cause;
        break;
      case 1:  // any node, possibly not assignable
        l.symptom_leaf = pick(s_all);
        l.root_cause = pick(r_all);
        break;
      case 2:  // invalid reply
        break;
      default:
        l.symptom_leaf = pick(s_leaves);
        l.root_cause = pick(r_leaves);
        break;
    }
    l.valid = l.symptom_leaf && l.root_cause && label_is_valid(l, taxonomies);
    if (rng.below(25) == 0) {
      l.valid = false;
      l.error = "replay_miss: synthetic";
    }
    c.gold.add(std::move(g));
    c.labels.push_back(std::move(l));
  }
  return c;
}

Stage2Case random_stage2_case(std::size_t n, std::uint64_t seed) {
  PortableRng rng(seed);
  Stage2Case c;
  for (std::size_t i = 0; i < n; ++i) {
    FilterDecision d;
    d.key = {"o/r", static_cast<std::int64_t>(i + 1)};
    d.final = rng.below(2) == 0;
    if (rng.below(20) == 0) {
      d.final = false;
      d.error = "network: synthetic";
    }
    c.gold.add({d.key, rng.below(3) != 0, std::nullopt, std::nullopt});
    c.decisions.push_back(std::move(d));
  }
  return c;
}

namespace {

std::string prefix_at(const std::string& id, int level) {
  std::size_t pos = 0;
  for (int k = 0; k < level; ++k) {
    pos = id.find('.', pos);
    if (pos == std::string::npos) return id;
    if (k + 1 < level) ++pos;
  }
  return id.substr(0, pos);
}

}  // namespace

Ratio naive_level_accuracy(const Stage3Case& c, const TaxonomyPair& taxonomies, TaxonomyKind kind, int level) {
  const auto& t = kind == TaxonomyKind::kSymptom ? taxonomies.symptoms : taxonomies.root_causes;
  std::int64_t hits = 0, total = 0;
  for (const auto& l : c.labels) {
    const auto* g = c.gold.find(l.key);
    const auto& gold_id = kind == TaxonomyKind::kSymptom ? g->symptom_leaf : g->root_cause;
    const auto& pred_id = kind == TaxonomyKind::kSymptom ? l.symptom_leaf : l.root_cause;
    ++total;
    if (!l.valid || l.error || !pred_id) continue;
    const auto* node = t.find(*pred_id);
    if (node == nullptr || !t.is_leaf_granular(*node)) continue;
    if (prefix_at(*pred_id, level) == prefix_at(*gold_id, level)) ++hits;
  }
  return Ratio(hits, total);
}

}  // namespace faultloom::testing

namespace faultloom::testing {

Stage2Case stage2_fixture() {
  //           TP TP TP TP TP TP FP FP FN TN
  const bool truth[] = {true, true, true, true, true, true, false, false, true, false};
  const bool pred[] = {true, true, true, true, true, true, true, true, false, false};
  Stage2Case c;
  for (int i = 0; i < 10; ++i) {
    FilterDecision d;
    d.key = {"o/r", i + 1};
    d.final = pred[i];
    c.decisions.push_back(d);
    c.gold.add({d.key, truth[i], std::nullopt, std::nullopt});
  }
  return c;
}

Stage3Case stage3_fixture(const TaxonomyPair& taxonomies) {
  auto s = [&](std::string_view name) { return resolve_label(taxonomies.symptoms, name).id; };
  auto r = [&](std::string_view name) { return resolve_label(taxonomies.root_causes, name).id; };
  struct Row {
    const char* gold_s;
    const char* gold_r;
    const char* pred_s;
    const char* pred_r;
  };
  const Row rows[] = {
      {"Memory Leak", "API Misuse", "Memory Leak", "API Misuse"},
      {"Memory Leak", "API Misuse", "Out of Memory", "Incorrect Code Logic"},
      {"Build Failure", "Unknown", "Build Failure", "Unknown"},
      {"NaN Output", "Missing Dependency", "NaN Output", "Dependency Version Mismatch"},
  };
  Stage3Case c;
  int n = 0;
  for (const auto& row : rows) {
    IssueKey key{"o/r", ++n};
    c.gold.add({key, true, s(row.gold_s), r(row.gold_r)});
    FaultLabel l;
    l.key = key;
    l.symptom_leaf = s(row.pred_s);
    l.root_cause = r(row.pred_r);
    l.valid = true;
    l.attempts = 1;
    c.labels.push_back(l);
  }
  return c;
}

}  // namespace faultloom::testing
