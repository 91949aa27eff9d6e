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

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "demo/demo.hpp"
#include "faultloom/error.hpp"
#include "faultloom/pipeline.hpp"
#include "faultloom/text.hpp"
#include "support/support.hpp"

using namespace faultloom;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path demo_dir() { return testing::data_dir() / "demo"; }

PipelineConfig demo_config(const fs::path& out) {
  auto c = load_pipeline_config(demo_dir() / "faultloom.json");
  c.output_dir = out;
  return c;
}

PipelineDeps quiet(llm::ChatClient* chat = nullptr) {
  PipelineDeps d;
  d.chat = chat;
  d.env = [](std::string_view) -> std::optional<std::string> { return std::nullopt; };
  d.sleeper = [](std::chrono::milliseconds) {};
  return d;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

json demo_doc() { return testing::read_json(demo_dir() / "faultloom.json"); }

}  // namespace

TEST_CASE("config parsing resolves paths and rejects unknown keys") {
  auto c = parse_pipeline_config(demo_doc(), demo_dir());
  CHECK(c.criteria == demo_dir() / "criteria.json");
  CHECK(c.model_id == "google/gemini-2.5-flash");
  CHECK(c.sampling.seed == 20250101);
  CHECK(c.parallelism == 8);
  CHECK(c.study.has_value());
  CHECK_NOTHROW(validate(c));

  auto doc = demo_doc();
  doc["modle"] = {{"id", "x/y"}};
  CHECK(code_of([&] { parse_pipeline_config(doc, demo_dir()); }) == ErrorCode::kConfig);
  doc = demo_doc();
  doc["sampling"]["n_pos"] = "many";
  CHECK(code_of([&] { parse_pipeline_config(doc, demo_dir()); }) == ErrorCode::kConfig);
  doc = demo_doc();
  doc["mode"] = "offline";
  CHECK(code_of([&] { parse_pipeline_config(doc, demo_dir()); }) == ErrorCode::kConfig);
  doc = demo_doc();
  doc.erase("criteria");
  CHECK(code_of([&] { parse_pipeline_config(doc, demo_dir()); }) == ErrorCode::kConfig);
}

TEST_CASE("validation catches missing files and transcripts") {
  auto c = parse_pipeline_config(demo_doc(), demo_dir());
  auto bad = c;
  bad.transcript = demo_dir() / "nope.jsonl";
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::kConfig);
  bad = c;
  bad.transcript.reset();
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::kConfig);
  bad = c;
  bad.gold = demo_dir() / "missing.csv";
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::kConfig);
  bad = c;
  bad.parallelism = 0;
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::kConfig);
  bad = c;
  bad.mode = llm::GatewayMode::kLive;
  bad.transcript.reset();
  CHECK_NOTHROW(validate(bad));

  ConfigOverrides o;
  o.seed = 9;
  o.parallelism = 2;
  o.mode = llm::GatewayMode::kRecord;
  apply(c, o);
  CHECK(c.sampling.seed == 9);
  CHECK(c.parallelism == 2);
  CHECK(c.mode == llm::GatewayMode::kRecord);
}

TEST_CASE("a stage without its input names the producing command") {
  testing::TempDir dir;
  Pipeline p(demo_config(dir.path()), quiet());
  try {
    p.filter();
    FAIL("expected missing artifact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingArtifact);
    CHECK(e.subject() == (dir.path() / "sample.jsonl").string());
    CHECK(std::string(e.what()).find("faultloom sample") != std::string::npos);
  }
}

TEST_CASE("a live run without credentials fails before any stage") {
  testing::TempDir dir;
  auto c = demo_config(dir.path());
  c.mode = llm::GatewayMode::kLive;
  testing::CountingTransport http;
  auto deps = quiet();
  deps.http = &http;
  Pipeline p(c, deps);
  try {
    p.run();
    FAIL("expected missing credentials");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingCredentials);
    CHECK(e.subject() == "FAULTLOOM_API_KEY_GOOGLE");
  }
  CHECK_FALSE(fs::exists(dir / "corpus.jsonl"));
  CHECK(http.count() == 0);
}

TEST_CASE("replay run, resume and conflicts") {
  testing::TempDir dir;
  testing::CountingTransport http;
  auto deps = quiet();
  deps.http = &http;
  EvalReport first;
  {
    Pipeline p(demo_config(dir.path()), deps);
    first = p.run();
  }
  CHECK(http.count() == 0);
  REQUIRE(first.stage1.has_value());
  CHECK(first.stage1->plan.recall == Ratio(1, 3));
  REQUIRE(first.stage2.has_value());
  CHECK(first.stage2->scored == 500);
  CHECK_FALSE(first.run_meta.wall_time_ms.has_value());
  auto plan = text::read_file(dir / "stage1_plan.json");
  CHECK(plan.find("TensorFlow.js") != std::string::npos);

  const auto eval_before = text::read_file(dir / "evaluation.json");
  {
    Pipeline p(demo_config(dir.path()), deps);
    auto again = p.run();
    CHECK(to_json(again) == to_json(first));
  }
  CHECK(text::read_file(dir / "evaluation.json") == eval_before);
  int skipped = 0;
  for (const auto& line : text::split_lines(text::read_file(dir / "timing.jsonl"))) {
    if (!line.empty() && json::parse(line).at("skipped").get<bool>()) ++skipped;
  }
  CHECK(skipped == 6);  // corpus, sample, define, filter, classify, evaluate

  {
    auto c = demo_config(dir.path());
    c.sampling.seed = 1;
    Pipeline p(c, deps);
    CHECK(code_of([&] { p.run(); }) == ErrorCode::kArtifactConflict);
  }
  {
    text::write_file_atomic(dir / "stage2_decisions.jsonl", "");
    Pipeline p(demo_config(dir.path()), deps);
    CHECK(code_of([&] { p.filter(); }) == ErrorCode::kArtifactConflict);
  }
}

TEST_CASE("report is reproducible from artifacts") {
  testing::TempDir dir;
  Pipeline p(demo_config(dir.path()), quiet());
  p.run();
  const auto summary = text::read_file(dir / "summary.md");
  const auto metrics = text::read_file(dir / "tables" / "metrics.csv");
  p.report();
  CHECK(text::read_file(dir / "summary.md") == summary);
  CHECK(text::read_file(dir / "tables" / "metrics.csv") == metrics);
  CHECK(text::read_file(dir / "report.json") == text::read_file(dir / "evaluation.json"));
  CHECK(summary.rfind("# FaultLoom run summary", 0) == 0);

  text::write_file_atomic(dir / "stage3_labels.jsonl", "");
  CHECK(code_of([&] { p.report(); }) == ErrorCode::kArtifactConflict);
}

TEST_CASE("one pipeline per run directory") {
  testing::TempDir dir;
  Pipeline p(demo_config(dir.path()), quiet());
  CHECK(code_of([&] { Pipeline q(demo_config(dir.path()), quiet()); }) == ErrorCode::kRunLocked);
}

TEST_CASE("an empty Stage III input is reported, not hidden") {
  testing::TempDir dir;
  testing::FunctionClient client([](const llm::ChatRequest& r) {
    if (r.user_text.find("research_questions") != std::string::npos) {
      return std::string(R"({"projects":["TensorFlow.js"],"research_questions":["q"]})");
    }
    return std::string(R"({"fault_related": false})");
  });
  Pipeline p(demo_config(dir.path()), quiet(&client));
  auto r = p.run();
  CHECK(r.run_meta.counts.at("stage3_labels") == 0);
  CHECK_FALSE(r.stage3_symptom.has_value());
  CHECK_FALSE(r.stage3_root_cause.has_value());
  REQUIRE_FALSE(r.run_meta.notes.empty());
  CHECK(r.run_meta.notes[0].find("Stage III received 0 issues") != std::string::npos);
  auto summary = text::read_file(dir / "summary.md");
  CHECK(summary.find("Not scored: no labels were produced (0 items)") != std::string::npos);
}

TEST_CASE("gold-annotated wiring classifies every annotated issue") {
  testing::TempDir dir;
  auto c = demo_config(dir.path());
  c.stage3_input = Stage3Input::kGoldAnnotated;
  c.study.reset();
  auto tax = TaxonomyPair{load_taxonomy_file(c.symptom_taxonomy), load_taxonomy_file(c.root_cause_taxonomy)};
  auto gold = load_gold_file(c.gold);
  demo::ScriptedModel model(demo::Behaviour::kPerfect, gold, tax);
  Pipeline p(c, quiet(&model));
  auto r = p.run();
  std::int64_t annotated = 0;
  for (const auto& g : gold.labels()) annotated += (g.symptom_leaf || g.root_cause) ? 1 : 0;
  CHECK(r.run_meta.counts.at("stage3_labels") == annotated);
  REQUIRE(r.stage3_symptom.has_value());
  CHECK(r.stage3_symptom->accuracy == Ratio(1, 1));
  CHECK(r.stage3_root_cause->accuracy == Ratio(1, 1));
  CHECK_FALSE(r.stage1.has_value());
}
