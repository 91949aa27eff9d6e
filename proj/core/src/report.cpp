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

#include "faultloom/report.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "faultloom/text.hpp"

namespace faultloom {

namespace {

std::string percent(const Ratio& r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", r.value() * 100.0);
  return buf;
}

std::string cell(const std::optional<Ratio>& r) { return r ? percent(*r) + " (" + r->to_string() + ")" : "n/a"; }

std::string decimal(const Ratio& r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", r.value());
  return buf;
}

void add_metric(std::string& csv, const std::string& model, const char* stage, const char* metric, const Ratio& r) {
  csv += model + "," + stage + "," + metric + "," + r.to_string() + "," + decimal(r) + "\n";
}

void stage3_section(std::string& md, const char* title, const std::optional<Stage3Scores>& s) {
  md += "## " + std::string(title) + "\n\n";
  if (!s) {
    md += "Not scored: no labels were produced (0 items).\n\n";
    return;
  }
  md += "Scored items: " + std::to_string(s->scored) + " (invalid labels: " + std::to_string(s->invalid) +
        ", excluded without gold: " + std::to_string(s->excluded) + ")\n\n";
  md += "| Level | Accuracy |\n|---|---|\n";
  for (std::size_t i = 0; i < s->per_level.size(); ++i) {
    md += "| L" + std::to_string(i + 1) + " | " + cell(s->per_level[i]) + " |\n";
  }
  md += "\n";
}

}  // namespace

std::map<std::string, std::string> render_tables(const EvalReport& r) {
  std::map<std::string, std::string> tables;
  const auto& model = r.run_meta.model_id;

  std::string metrics = "model,stage,metric,fraction,value\n";
  if (r.stage1) add_metric(metrics, model, "stage1", "reference_recall", r.stage1->plan.recall);
  if (r.stage2) {
    add_metric(metrics, model, "stage2", "accuracy", r.stage2->accuracy);
    if (r.stage2->precision) add_metric(metrics, model, "stage2", "precision", *r.stage2->precision);
    if (r.stage2->recall) add_metric(metrics, model, "stage2", "recall", *r.stage2->recall);
    tables["stage2_confusion.csv"] = confusion_csv(r.stage2->confusion);
  }
  std::string levels = "model,taxonomy,level,fraction,value\n";
  for (const auto* s : {&r.stage3_symptom, &r.stage3_root_cause}) {
    if (!*s) continue;
    const auto& sc = **s;
    const auto kind = std::string(to_string(sc.kind));
    add_metric(metrics, model, ("stage3_" + kind).c_str(), "accuracy", sc.accuracy);
    for (std::size_t i = 0; i < sc.per_level.size(); ++i) {
      levels += model + "," + kind + ",L" + std::to_string(i + 1) + "," + sc.per_level[i].to_string() + "," +
                decimal(sc.per_level[i]) + "\n";
    }
    tables["stage3_" + kind + "_confusion.csv"] = confusion_csv(sc.confusion);
  }
  tables["metrics.csv"] = metrics;
  tables["accuracy_by_level.csv"] = levels;
  return tables;
}

std::string render_summary(const EvalReport& r) {
  const auto& meta = r.run_meta;
  std::string md = "# FaultLoom run summary\n\n";
  md += "- Model: `" + meta.model_id + "`\n";
  md += "- Mode: " + meta.mode + "\n";
  if (meta.wall_time_ms) md += "- Wall time: " + std::to_string(*meta.wall_time_ms) + " ms\n";
  md += "- Model calls: " + std::to_string(meta.total.calls) + "; tokens in/out: " +
        std::to_string(meta.total.input_tokens) + "/" + std::to_string(meta.total.output_tokens) + "\n";
  md += "- Model latency (sum): " + std::to_string(meta.total.latency_ms) + " ms\n";
  for (const auto& [k, v] : meta.counts) md += "- " + k + ": " + std::to_string(v) + "\n";
  md += "\n";

  if (r.stage1) {
    md += "## Stage I: study definition\n\n";
    md += "Proposed projects: " + std::to_string(r.stage1->proposed_projects) +
          "; research questions: " + std::to_string(r.stage1->research_questions) + "\n\n";
    md += "Reference recall: " + cell(r.stage1->plan.recall) + "\n\n";
    for (const auto& m : r.stage1->plan.misses) md += "- missed: " + m + "\n";
    if (!r.stage1->plan.misses.empty()) md += "\n";
  }

  md += "## Stage II: fault-related filtering\n\n";
  if (r.stage2) {
    const auto& s = *r.stage2;
    md += "| Metric | Value |\n|---|---|\n";
    md += "| Accuracy | " + cell(s.accuracy) + " |\n";
    md += "| Precision | " + cell(s.precision) + " |\n";
    md += "| Recall | " + cell(s.recall) + " |\n\n";
    md += "Scored: " + std::to_string(s.scored) + "; TP " + std::to_string(s.tp) + ", FP " + std::to_string(s.fp) +
          ", FN " + std::to_string(s.fn) + ", TN " + std::to_string(s.tn) + "; errored: " + std::to_string(s.errored) +
          "; excluded without gold: " + std::to_string(s.excluded) + "\n\n";
  } else {
    md += "Not scored.\n\n";
  }
  stage3_section(md, "Stage III: symptoms", r.stage3_symptom);
  stage3_section(md, "Stage III: root causes", r.stage3_root_cause);

  if (!meta.notes.empty()) {
    md += "## Notes\n\n";
    for (const auto& n : meta.notes) md += "- " + n + "\n";
  }
  return md;
}

std::string render_report_json(const EvalReport& report) { return to_json(report).dump(2) + "\n"; }

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  text::write_file_atomic(dir / "report.json", render_report_json(report));
  text::write_file_atomic(dir / "summary.md", render_summary(report));
  for (const auto& [name, csv] : render_tables(report)) text::write_file_atomic(dir / "tables" / name, csv);
}

}  // namespace faultloom
