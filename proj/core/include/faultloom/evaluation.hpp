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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "faultloom/classify.hpp"
#include "faultloom/corpus.hpp"
#include "faultloom/filter.hpp"
#include "faultloom/llm/chat.hpp"
#include "faultloom/rational.hpp"
#include "faultloom/study.hpp"
#include "faultloom/taxonomy.hpp"

namespace faultloom {

inline constexpr const char* kInvalidClass = "invalid";

// Rows are gold classes, columns predicted classes. The last class is always
// the reserved "invalid" class; it only ever receives predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> classes);

  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  std::size_t index_of(const std::string& cls) const;  // throws kInvalidArgument
  std::size_t invalid_index() const { return classes_.size() - 1; }

  void add(std::size_t gold, std::size_t predicted);
  std::int64_t at(std::size_t gold, std::size_t predicted) const { return counts_[gold * size() + predicted]; }
  std::int64_t row_sum(std::size_t gold) const;
  std::int64_t column_sum(std::size_t predicted) const;
  std::int64_t trace() const;
  std::int64_t total() const { return total_; }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> classes_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

struct ClassScore {
  std::string cls;
  std::int64_t support = 0;    // gold count
  std::int64_t predicted = 0;  // column count
  std::int64_t correct = 0;
  std::optional<Ratio> precision;
  std::optional<Ratio> recall;
};

std::vector<ClassScore> per_class_scores(const ConfusionMatrix& m);

nlohmann::json to_json(const ConfusionMatrix& m);
// Delimited table: header "gold\\predicted,<classes...>", one row per class.
std::string confusion_csv(const ConfusionMatrix& m);

enum class MissingGold { kError, kExclude };

struct Stage2Scores {
  std::int64_t scored = 0;
  std::int64_t excluded = 0;  // no gold fault_related value
  std::int64_t errored = 0;   // decision carried a per-issue failure
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  Ratio accuracy;
  std::optional<Ratio> precision;  // absent when nothing was predicted positive
  std::optional<Ratio> recall;     // absent when gold has no positives
  ConfusionMatrix confusion{{"fault_related", "not_fault_related", kInvalidClass}};
};

// Fault-related is the positive class. A decision with a recorded error is
// scored in the "invalid" column and as a negative prediction.
Stage2Scores score_stage2(const std::vector<FilterDecision>& decisions, const GoldSet& gold,
                          MissingGold missing = MissingGold::kError);

struct Stage3Scores {
  TaxonomyKind kind = TaxonomyKind::kSymptom;
  int granularity = 0;
  std::int64_t scored = 0;
  std::int64_t excluded = 0;
  std::int64_t invalid = 0;
  Ratio accuracy;                // at `granularity`
  std::vector<Ratio> per_level;  // index 0 is level 1, up to `granularity`
  ConfusionMatrix confusion{{kInvalidClass}};
};

// Exact-node accuracy at the granularity (gold and predictions are mapped to
// their ancestor at that level). Labels that are not valid in this taxonomy
// count as wrong and land in the invalid column. The gold id is the
// symptom_leaf or root_cause field depending on the taxonomy kind.
Stage3Scores score_stage3(const std::vector<FaultLabel>& labels, const GoldSet& gold, const Taxonomy& taxonomy,
                          int granularity, MissingGold missing = MissingGold::kError);

Ratio hierarchical_accuracy(const std::vector<FaultLabel>& labels, const GoldSet& gold, const Taxonomy& taxonomy,
                            int level, MissingGold missing = MissingGold::kError);

nlohmann::json to_json(const Stage2Scores& s);
nlohmann::json to_json(const Stage3Scores& s);

struct RunMeta {
  std::optional<std::int64_t> wall_time_ms;  // omitted for replayed runs
  std::string mode;
  std::string model_id;
  llm::Usage total;
  std::map<std::string, llm::Usage> per_model;
  std::int64_t invalid_labels = 0;
  std::map<std::string, std::int64_t> counts;  // e.g. sampled, stage2_positive
  std::vector<std::string> notes;
};

struct Stage1Scores {
  std::int64_t proposed_projects = 0;
  std::int64_t research_questions = 0;
  PlanScore plan;
};

nlohmann::json to_json(const Stage1Scores& s);

struct EvalReport {
  std::optional<Stage1Scores> stage1;
  std::optional<Stage2Scores> stage2;
  std::optional<Stage3Scores> stage3_symptom;
  std::optional<Stage3Scores> stage3_root_cause;
  RunMeta run_meta;
};

nlohmann::json to_json(const RunMeta& meta);
nlohmann::json to_json(const EvalReport& report);

}  // namespace faultloom
