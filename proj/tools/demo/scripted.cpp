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

#include <unistd.h>

#include <algorithm>
#include <filesystem>

#include "demo.hpp"
#include "faultloom/error.hpp"
#include "faultloom/pipeline.hpp"
#include "faultloom/text.hpp"

namespace faultloom::demo {

using nlohmann::json;

namespace {

std::optional<IssueKey> issue_in(const std::string& user_text) {
  static const std::string marker = "\nIssue: ";
  auto pos = user_text.find(marker);
  if (pos == std::string::npos) return std::nullopt;
  pos += marker.size();
  auto end = user_text.find('\n', pos);
  return IssueKey::parse(user_text.substr(pos, end - pos));
}

const TaxonomyNode* sibling_leaf(const Taxonomy& t, const TaxonomyNode& node) {
  const auto* parent = t.parent_of(node);
  if (parent == nullptr) return nullptr;
  for (const auto& c : parent->children) {
    if (&c != &node && t.is_leaf_granular(c)) return &c;
  }
  return nullptr;
}

// A leaf under a different level-1 root.
const TaxonomyNode* distant_leaf(const Taxonomy& t, const TaxonomyNode& node, std::uint32_t h) {
  const auto& root = ancestor_at(t, node, 1);
  auto leaves = t.leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const auto* cand = leaves[(h + i) % leaves.size()];
    if (&ancestor_at(t, *cand, 1) != &root) return cand;
  }
  return nullptr;
}

std::string label_json(const std::string& symptom, const std::string& cause, const std::string& why) {
  return json{{"symptom", symptom}, {"root_cause", cause}, {"rationale", why}}.dump();
}

}  // namespace

ScriptedModel::ScriptedModel(Behaviour behaviour, const GoldSet& gold, const TaxonomyPair& taxonomies,
                             std::vector<std::string> reference)
    : behaviour_(behaviour), gold_(gold), taxonomies_(taxonomies), reference_(std::move(reference)) {}

llm::ChatResponse ScriptedModel::complete(const llm::ChatRequest& request) {
  ++calls_;
  llm::ChatResponse r;
  r.text = reply_text(request);
  r.input_tokens = static_cast<std::int64_t>((request.system_text.size() + request.user_text.size()) / 4);
  r.output_tokens = static_cast<std::int64_t>(r.text.size() / 4) + 1;
  auto key = issue_in(request.user_text);
  r.latency_ms = 300 + (key ? key_hash(*key) % 900 : 1200) + (r.output_tokens % 50);
  r.provider_meta = {{"provider", "scripted"}, {"finish_reason", "stop"}, {"truncated", false}};
  return r;
}

std::string ScriptedModel::reply_text(const llm::ChatRequest& request) const {
  const auto& user = request.user_text;
  const bool repair = user.find("Your previous reply could not be used") != std::string::npos;
  if (user.find("\"research_questions\"") != std::string::npos) return stage1_reply();
  auto key = issue_in(user);
  if (!key) throw Error(ErrorCode::kInvalidArgument, "scripted model: prompt names no issue");
  if (user.find("SYMPTOM TAXONOMY") != std::string::npos) return stage3_reply(*key, repair);
  return stage2_reply(*key, repair);
}

std::string ScriptedModel::stage1_reply() const {
  json projects = json::array();
  json questions = json::array({"What are the symptoms of faults in JavaScript deep-learning libraries?",
                                "What are their root causes?",
                                "How do symptoms relate to root causes?"});
  if (behaviour_ == Behaviour::kPerfect) {
    for (const auto& name : reference_) projects.push_back({{"name", name}, {"rationale", "reference item"}});
  } else {
    projects.push_back({{"name", "TensorFlow.js"},
                        {"url", "https://github.com/tensorflow/tfjs"},
                        {"rationale", "The most widely used JavaScript deep-learning library."}});
    projects.push_back({{"name", "Brain.js"}, {"url", "https://github.com/BrainJS/brain.js"},
                        {"rationale", "A popular neural-network library for JavaScript."}});
    projects.push_back({{"name", "ONNX Runtime Web"}, {"url", "https://github.com/microsoft/onnxruntime"},
                        {"rationale", "Runs exported models in browsers."}});
    projects.push_back({{"name", "tensorflow js"}, {"rationale", "duplicate mention"}});
  }
  return "Here is the proposed plan.\n```json\n" +
         json{{"projects", projects}, {"research_questions", questions}}.dump(2) + "\n```\n";
}

std::string ScriptedModel::stage2_reply(const IssueKey& key, bool repair) const {
  (void)repair;
  const auto* g = gold_.find(key);
  const bool truth = g != nullptr && g->fault_related.value_or(false);
  const auto h = key_hash(key);
  bool verdict = truth;
  if (behaviour_ != Behaviour::kPerfect) {
    if (h % 97 == 13) return "This one is clearly about a fault in the library.";
    if (truth && h % 20 == 0) verdict = false;
    if (!truth && h % 5 == 0) verdict = true;
  }
  return json{{"fault_related", verdict},
              {"rationale", verdict ? "The issue reports observable erroneous behaviour with technical detail."
                                    : "The issue is a question or discussion rather than a fault report."}}
      .dump();
}

std::string ScriptedModel::stage3_reply(const IssueKey& key, bool repair) const {
  const auto* g = gold_.find(key);
  const auto& S = taxonomies_.symptoms;
  const auto& R = taxonomies_.root_causes;
  const TaxonomyNode* symptom = g && g->symptom_leaf ? S.find(*g->symptom_leaf) : nullptr;
  const TaxonomyNode* cause = g && g->root_cause ? R.find(*g->root_cause) : nullptr;
  if (symptom == nullptr) symptom = &S.node(S.leaves().front()->id);
  if (cause == nullptr) cause = &R.node(R.leaves().back()->id);
  const auto h = key_hash(key);

  switch (behaviour_) {
    case Behaviour::kPerfect:
      return label_json(symptom->name, cause->name, "Matches the reported behaviour.");
    case Behaviour::kAdversarial:
      switch (h % 6) {
        case 0: return "symptom: Memory Leak; root cause: Unimplemented Operator";
        case 1: return label_json(S.roots().front().name, cause->name, "level-1 name");
        case 2: return label_json("Quantum Error", cause->name, "made up");
        case 3: return repair ? label_json(symptom->name, cause->name, "fixed") : "{\"symptom\": \"Memory Leak\"";
        case 4:
          return repair ? label_json(symptom->name, cause->name, "fixed")
                        : label_json(symptom->name, R.roots().front().name, "level-1 root cause");
        default: return label_json(symptom->name, cause->name, "direct");
      }
    case Behaviour::kRealistic:
      break;
  }

  if (h % 29 == 11) return label_json("Quantum Error", cause->name, "The failure looks exotic.");
  if (!repair && h % 13 == 5) return label_json(ancestor_at(S, *symptom, 1).name, cause->name, "Broad category.");
  if (!repair && h % 17 == 8) return "The symptom is " + symptom->name + " and the cause is " + cause->name + ".";

  const TaxonomyNode* s = symptom;
  if (h % 10 == 3) {
    if (const auto* alt = sibling_leaf(S, *symptom)) s = alt;
  } else if (h % 10 == 6) {
    if (const auto* alt = distant_leaf(S, *symptom, h)) s = alt;
  }
  const TaxonomyNode* c = cause;
  if (h % 7 == 2) {
    if (const auto* alt = sibling_leaf(R, *cause)) c = alt;
  }
  return "```json\n" + label_json(s->name, c->name, "Based on the error description and the maintainer replies.") +
         "\n```";
}

void write_demo_fixtures(const std::filesystem::path& dir, const std::filesystem::path& taxonomy_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  SyntheticSpec spec;
  TaxonomyPair taxonomies{load_taxonomy_file(taxonomy_dir / "symptom.json"),
                          load_taxonomy_file(taxonomy_dir / "root_cause.json")};
  auto study = make_synthetic_study(spec, taxonomies);

  export_dump(study.corpus, dir / "corpus.jsonl");
  text::write_file_atomic(dir / "gold.csv", serialize_gold_csv(study.gold));
  std::string vocab = "# Demo vocabulary. A real study supplies its own list.\n";
  for (const auto& t : demo_vocabulary()) vocab += t + "\n";
  text::write_file_atomic(dir / "vocabulary.txt", vocab);
  text::write_file_atomic(dir / "criteria.json", demo_criteria(spec).dump(2) + "\n");
  std::string reference;
  for (const auto& r : demo_reference()) reference += r + "\n";
  text::write_file_atomic(dir / "reference.txt", reference);

  const auto rel_tax = fs::relative(taxonomy_dir, dir).generic_string();
  json config{{"corpus", {{"dumps", {"corpus.jsonl"}}}},
              {"criteria", "criteria.json"},
              {"vocabulary", "vocabulary.txt"},
              {"taxonomies", {{"symptom", rel_tax + "/symptom.json"}, {"root_cause", rel_tax + "/root_cause.json"}}},
              {"gold", "gold.csv"},
              {"model", {{"id", "google/gemini-2.5-flash"}, {"max_output_tokens", 1024}}},
              {"mode", "replay"},
              {"transcript", "transcript.jsonl"},
              {"sampling", {{"enabled", true}, {"n_pos", 250}, {"n_neg", 250}, {"seed", 20250101}}},
              {"parallelism", 8},
              {"output_dir", "../../runs/demo"},
              {"stage3_input", "stage2_positive"},
              {"study", {{"theme", demo_theme()}, {"constraints", demo_constraints()}, {"reference", "reference.txt"}}}};
  text::write_file_atomic(dir / "faultloom.json", config.dump(2) + "\n");

  // Record the transcript through the gateway with the scripted model behind it.
  auto pipeline_config = load_pipeline_config(dir / "faultloom.json");
  const auto run_dir = fs::temp_directory_path() / ("faultloom-fixtures-" + std::to_string(::getpid()));
  fs::remove_all(run_dir);
  fs::remove(dir / "transcript.jsonl");
  pipeline_config.mode = llm::GatewayMode::kRecord;
  pipeline_config.output_dir = run_dir;
  pipeline_config.parallelism = 1;

  ScriptedModel model(Behaviour::kRealistic, study.gold, taxonomies);
  PipelineDeps deps;
  deps.providers = [&model](const llm::ProviderSpec&, const std::string&) {
    return std::make_unique<ClientProvider>(model);
  };
  deps.env = [](std::string_view) -> std::optional<std::string> { return "scripted"; };
  {
    Pipeline pipeline(pipeline_config, std::move(deps));
    pipeline.run();
  }
  fs::remove_all(run_dir);

  // Entries are appended in completion order; sort by digest for a stable file.
  auto transcript = llm::Transcript::load(dir / "transcript.jsonl");
  auto entries = transcript->entries();
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.request_digest < b.request_digest; });
  llm::Transcript sorted;
  for (const auto& e : entries) sorted.append(e.request_digest, e.response);
  text::write_file_atomic(dir / "transcript.jsonl", sorted.serialize());
}

}  // namespace faultloom::demo
