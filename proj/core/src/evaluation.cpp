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

#include "faultloom/evaluation.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"

namespace faultloom {

using nlohmann::json;

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes) : classes_(std::move(classes)) {
  if (classes_.empty() || classes_.back() != kInvalidClass) classes_.emplace_back(kInvalidClass);
  counts_.assign(classes_.size() * classes_.size(), 0);
}

std::size_t ConfusionMatrix::index_of(const std::string& cls) const {
  auto it = std::find(classes_.begin(), classes_.end(), cls);
  if (it == classes_.end()) throw Error(ErrorCode::kInvalidArgument, "class not in matrix: " + cls, cls);
  return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(std::size_t gold, std::size_t predicted) {
  if (gold >= size() || predicted >= size() || gold == invalid_index()) {
    throw Error(ErrorCode::kInvalidArgument, "confusion cell out of range");
  }
  ++counts_[gold * size() + predicted];
  ++total_;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::int64_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += at(gold, j);
  return s;
}

std::int64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += at(i, predicted);
  return s;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i + 1 < size(); ++i) s += at(i, i);
  return s;
}

std::vector<ClassScore> per_class_scores(const ConfusionMatrix& m) {
  std::vector<ClassScore> out;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    ClassScore c;
    c.cls = m.classes()[i];
    c.support = m.row_sum(i);
    c.predicted = m.column_sum(i);
    c.correct = m.at(i, i);
    if (c.predicted > 0) c.precision = Ratio(c.correct, c.predicted);
    if (c.support > 0) c.recall = Ratio(c.correct, c.support);
    out.push_back(std::move(c));
  }
  return out;
}

json to_json(const ConfusionMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  json per_class = json::array();
  for (const auto& c : per_class_scores(m)) {
    per_class.push_back({{"class", c.cls},
                         {"support", c.support},
                         {"predicted", c.predicted},
                         {"correct", c.correct},
                         {"precision", c.precision ? to_json(*c.precision) : json(nullptr)},
                         {"recall", c.recall ? to_json(*c.recall) : json(nullptr)}});
  }
  return json{{"classes", m.classes()}, {"counts", rows}, {"total", m.total()}, {"per_class", per_class}};
}

std::string confusion_csv(const ConfusionMatrix& m) {
  std::string out = "gold\\predicted";
  for (const auto& c : m.classes()) out += "," + c;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.classes()[i];
    for (std::size_t j = 0; j < m.size(); ++j) out += "," + std::to_string(m.at(i, j));
    out += "\n";
  }
  return out;
}

namespace {

void check_consistent(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInternal, std::string("scoring cross-check failed: ") + what);
}

Error missing_gold(const IssueKey& key, const char* field) {
  return Error(ErrorCode::kMissingGold, key.to_string() + " has no gold " + field, key.to_string());
}

}  // namespace

Stage2Scores score_stage2(const std::vector<FilterDecision>& decisions, const GoldSet& gold, MissingGold missing) {
  Stage2Scores s;
  auto& m = s.confusion;
  const std::size_t pos = 0, neg = 1;
  std::int64_t naive_matches = 0;
  std::int64_t gold_pos = 0;

  for (const auto& d : decisions) {
    const auto* g = gold.find(d.key);
    if (g == nullptr || !g->fault_related) {
      if (missing == MissingGold::kError) throw missing_gold(d.key, "fault_related value");
      ++s.excluded;
      continue;
    }
    const bool truth = *g->fault_related;
    const bool predicted = !d.error && d.final;
    ++s.scored;
    if (truth) ++gold_pos;
    if (predicted == truth) ++naive_matches;
    if (d.error) ++s.errored;

    if (predicted && truth) ++s.tp;
    else if (predicted) ++s.fp;
    else if (truth) ++s.fn;
    else ++s.tn;

    m.add(truth ? pos : neg, d.error ? m.invalid_index() : (predicted ? pos : neg));
  }
  if (s.scored == 0) throw Error(ErrorCode::kNothingToScore, "no Stage II decisions to score");

  s.accuracy = Ratio(s.tp + s.tn, s.scored);
  if (s.tp + s.fp > 0) s.precision = Ratio(s.tp, s.tp + s.fp);
  if (s.tp + s.fn > 0) s.recall = Ratio(s.tp, s.tp + s.fn);

  check_consistent(m.total() == s.scored, "grid total");
  check_consistent(m.row_sum(pos) == gold_pos && m.row_sum(neg) == s.scored - gold_pos, "row sums");
  check_consistent(Ratio(naive_matches, s.scored) == s.accuracy, "accuracy");
  check_consistent(m.trace() + m.at(neg, m.invalid_index()) == s.tp + s.tn, "trace");
  return s;
}

namespace {

struct ScoredItem {
  const TaxonomyNode* gold = nullptr;
  const TaxonomyNode* predicted = nullptr;  // null when invalid
};

struct Collected {
  std::vector<ScoredItem> items;
  std::int64_t excluded = 0;
};

const TaxonomyNode* predicted_node(const FaultLabel& l, const Taxonomy& t) {
  if (!l.valid || l.error) return nullptr;
  const auto& id = t.kind() == TaxonomyKind::kSymptom ? l.symptom_leaf : l.root_cause;
  if (!id) return nullptr;
  const auto* n = t.find(*id);
  return n != nullptr && t.is_leaf_granular(*n) ? n : nullptr;
}

Collected collect(const std::vector<FaultLabel>& labels, const GoldSet& gold, const Taxonomy& t, MissingGold missing) {
  Collected c;
  const bool symptom = t.kind() == TaxonomyKind::kSymptom;
  const char* field = symptom ? "symptom_leaf id" : "root_cause id";
  for (const auto& l : labels) {
    const auto* g = gold.find(l.key);
    const auto* gold_id = g == nullptr ? nullptr : symptom ? &g->symptom_leaf : &g->root_cause;
    if (gold_id == nullptr || !*gold_id) {
      if (missing == MissingGold::kError) throw missing_gold(l.key, field);
      ++c.excluded;
      continue;
    }
    const auto* gn = t.find(**gold_id);
    if (gn == nullptr || !t.is_leaf_granular(*gn)) {
      throw Error(ErrorCode::kUnresolvableGold,
                  l.key.to_string() + ": gold id '" + **gold_id + "' is not a " + std::string(to_string(t.kind())) +
                      " leaf",
                  **gold_id);
    }
    c.items.push_back({gn, predicted_node(l, t)});
  }
  if (c.items.empty()) throw Error(ErrorCode::kNothingToScore, "no " + std::string(to_string(t.kind())) + " labels to score");
  return c;
}

void check_level(const Taxonomy& t, int level) {
  if (level < 1 || level > t.leaf_level()) {
    throw Error(ErrorCode::kInvalidArgument,
                "level " + std::to_string(level) + " outside 1.." + std::to_string(t.leaf_level()));
  }
}

Ratio accuracy_at(const std::vector<ScoredItem>& items, const Taxonomy& t, int level) {
  std::int64_t hits = 0;
  for (const auto& it : items) {
    if (it.predicted != nullptr && &ancestor_at(t, *it.predicted, level) == &ancestor_at(t, *it.gold, level)) ++hits;
  }
  return Ratio(hits, static_cast<std::int64_t>(items.size()));
}

}  // namespace

Ratio hierarchical_accuracy(const std::vector<FaultLabel>& labels, const GoldSet& gold, const Taxonomy& taxonomy,
                            int level, MissingGold missing) {
  check_level(taxonomy, level);
  return accuracy_at(collect(labels, gold, taxonomy, missing).items, taxonomy, level);
}

Stage3Scores score_stage3(const std::vector<FaultLabel>& labels, const GoldSet& gold, const Taxonomy& taxonomy,
                          int granularity, MissingGold missing) {
  check_level(taxonomy, granularity);
  auto c = collect(labels, gold, taxonomy, missing);

  std::vector<std::string> classes;
  for (const auto* n : taxonomy.granular_nodes(granularity)) classes.push_back(n->id);
  Stage3Scores s;
  s.kind = taxonomy.kind();
  s.granularity = granularity;
  s.scored = static_cast<std::int64_t>(c.items.size());
  s.excluded = c.excluded;
  s.confusion = ConfusionMatrix(classes);
  auto& m = s.confusion;

  std::int64_t naive_hits = 0;
  for (const auto& it : c.items) {
    const auto& g = ancestor_at(taxonomy, *it.gold, granularity);
    std::size_t col = m.invalid_index();
    if (it.predicted == nullptr) {
      ++s.invalid;
    } else {
      const auto& p = ancestor_at(taxonomy, *it.predicted, granularity);
      col = m.index_of(p.id);
      if (p.id == g.id) ++naive_hits;
    }
    m.add(m.index_of(g.id), col);
  }

  for (int level = 1; level <= granularity; ++level) s.per_level.push_back(accuracy_at(c.items, taxonomy, level));
  s.accuracy = s.per_level.back();

  check_consistent(m.total() == s.scored, "grid total");
  check_consistent(m.column_sum(m.invalid_index()) == s.invalid, "invalid column");
  check_consistent(Ratio(naive_hits, s.scored) == s.accuracy, "accuracy vs per-item count");
  check_consistent(Ratio(m.trace(), s.scored) == s.accuracy, "accuracy vs matrix trace");
  for (std::size_t i = 1; i < s.per_level.size(); ++i) {
    check_consistent(s.per_level[i - 1] >= s.per_level[i], "level monotonicity");
  }
  return s;
}

json to_json(const Stage2Scores& s) {
  auto opt = [](const std::optional<Ratio>& r) { return r ? to_json(*r) : json(nullptr); };
  return json{{"scored", s.scored},
              {"excluded_missing_gold", s.excluded},
              {"errored", s.errored},
              {"counts", {{"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}, {"tn", s.tn}}},
              {"accuracy", to_json(s.accuracy)},
              {"precision", opt(s.precision)},
              {"recall", opt(s.recall)},
              {"confusion", to_json(s.confusion)}};
}

json to_json(const Stage3Scores& s) {
  json levels = json::object();
  for (std::size_t i = 0; i < s.per_level.size(); ++i) levels["L" + std::to_string(i + 1)] = to_json(s.per_level[i]);
  return json{{"taxonomy", to_string(s.kind)},
              {"granularity", s.granularity},
              {"scored", s.scored},
              {"excluded_missing_gold", s.excluded},
              {"invalid", s.invalid},
              {"accuracy", to_json(s.accuracy)},
              {"per_level_accuracy", levels},
              {"confusion", to_json(s.confusion)}};
}

json to_json(const RunMeta& meta) {
  json per_model = json::object();
  for (const auto& [model, usage] : meta.per_model) per_model[model] = llm::to_json(usage);
  json counts = json::object();
  for (const auto& [k, v] : meta.counts) counts[k] = v;
  return json{{"wall_time_ms", meta.wall_time_ms ? json(*meta.wall_time_ms) : json(nullptr)},
              {"mode", meta.mode},
              {"model_id", meta.model_id},
              {"total_usage", llm::to_json(meta.total)},
              {"per_model", per_model},
              {"invalid_labels", meta.invalid_labels},
              {"counts", counts},
              {"notes", meta.notes}};
}

json to_json(const Stage1Scores& s) {
  return json{{"proposed_projects", s.proposed_projects},
              {"research_questions", s.research_questions},
              {"reference_recall", to_json(s.plan)}};
}

json to_json(const EvalReport& r) {
  auto opt = [](const auto& o) { return o ? to_json(*o) : json(nullptr); };
  return json{{"stage1", opt(r.stage1)},
              {"stage2", opt(r.stage2)},
              {"stage3_symptom", opt(r.stage3_symptom)},
              {"stage3_root_cause", opt(r.stage3_root_cause)},
              {"run_meta", to_json(r.run_meta)}};
}

}  // namespace faultloom
