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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "faultloom/evaluation.hpp"
#include "faultloom/http.hpp"
#include "faultloom/issue_tracker.hpp"
#include "faultloom/llm/gateway.hpp"
#include "faultloom/sampling.hpp"
#include "faultloom/study.hpp"

namespace faultloom {

enum class Stage3Input { kStage2Positive, kGoldAnnotated };

struct StudySection {
  StudyTheme theme;
  std::filesystem::path reference;
  NameNormalization normalization;
};

// Relative paths in the config document are resolved against the directory
// holding the document.
struct PipelineConfig {
  std::vector<std::filesystem::path> dumps;
  std::vector<std::string> repos;
  std::optional<DateWindow> window;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path criteria;
  std::filesystem::path vocabulary;
  std::filesystem::path symptom_taxonomy;
  std::filesystem::path root_cause_taxonomy;
  std::filesystem::path gold;
  std::string model_id;
  int max_output_tokens = 1024;
  llm::GatewayMode mode = llm::GatewayMode::kReplay;
  std::optional<std::filesystem::path> transcript;
  bool sampling_enabled = true;
  SampleRequest sampling;
  int parallelism = 4;
  std::filesystem::path output_dir;
  Stage3Input stage3_input = Stage3Input::kStage2Positive;
  std::optional<StudySection> study;
  llm::LimiterOptions limits;
};

PipelineConfig parse_pipeline_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

// Referenced input files exist, replay/record have a transcript path,
// parallelism >= 1, an output directory and a corpus source are set.
void validate(const PipelineConfig& config);

struct ConfigOverrides {
  std::optional<llm::GatewayMode> mode;
  std::optional<std::string> model_id;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::optional<std::filesystem::path> output_dir;
};

void apply(PipelineConfig& config, const ConfigOverrides& overrides);

// File names inside a run directory.
namespace artifacts {
inline constexpr const char* kConfigSnapshot = "config.json";
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kSample = "sample.jsonl";
inline constexpr const char* kStudyPlan = "stage1_plan.json";
inline constexpr const char* kStudyScore = "stage1_score.json";
inline constexpr const char* kDecisions = "stage2_decisions.jsonl";
inline constexpr const char* kLabels = "stage3_labels.jsonl";
inline constexpr const char* kEvaluation = "evaluation.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kSummary = "summary.md";
inline constexpr const char* kTiming = "timing.jsonl";
inline constexpr const char* kLock = ".lock";
inline constexpr const char* kMetaDir = ".meta";
}  // namespace artifacts

struct PipelineDeps {
  // Used for issue-tracker and provider traffic; a default HTTPS transport is
  // created when null.
  HttpTransport* http = nullptr;
  // Replaces the gateway entirely when set (tests, offline oracles).
  llm::ChatClient* chat = nullptr;
  // Builds gateway providers; defaults to HTTP providers over `http`.
  llm::ProviderFactory providers;
  llm::EnvLookup env = llm::process_environment();
  Sleeper sleeper = thread_sleeper();
  std::function<void(const std::string&)> log;
};

// One pipeline per run directory, guarded by an advisory lock held for the
// lifetime of the object. Every stage writes its artifact before the next
// starts and records a content hash of its inputs; a rerun with identical
// inputs skips the stage, while changed inputs are refused because artifacts
// are append-only.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, PipelineDeps deps = {});
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  void ingest();
  void import_dumps();
  void sample();
  void define();
  void filter();
  void classify();
  EvalReport evaluate();
  EvalReport report();

  // ingest or import, sample, define (when configured), filter, classify,
  // evaluate, report.
  EvalReport run();

  const PipelineConfig& config() const { return config_; }
  // Fails fast when live calls would be impossible (unknown provider,
  // missing credentials). No-op in replay mode or with an injected client.
  void check_ready();

 private:
  struct Impl;
  PipelineConfig config_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace faultloom
