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

#include "faultloom/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <set>

#include "faultloom/classify.hpp"
#include "faultloom/error.hpp"
#include "faultloom/filter.hpp"
#include "faultloom/hashing.hpp"
#include "faultloom/report.hpp"
#include "faultloom/text.hpp"
#include "faultloom/time.hpp"

namespace faultloom {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

std::string_view to_string(Stage3Input input) {
  return input == Stage3Input::kStage2Positive ? "stage2_positive" : "gold_annotated";
}

Stage3Input stage3_input_from_string(std::string_view s) {
  if (s == "stage2_positive") return Stage3Input::kStage2Positive;
  if (s == "gold_annotated") return Stage3Input::kGoldAnnotated;
  throw Error(ErrorCode::kConfig, "stage3_input must be stage2_positive or gold_annotated", std::string(s));
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.contains(k)) throw Error(ErrorCode::kConfig, "unknown key '" + k + "' in " + where, k);
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "config must be an object");
  reject_unknown_keys(doc,
                      {"corpus", "criteria", "vocabulary", "taxonomies", "gold", "model", "mode", "transcript",
                       "sampling", "parallelism", "output_dir", "stage3_input", "study", "limits"},
                      "config");
  auto path_of = [&](const json& v) { return (base_dir / v.get<std::string>()).lexically_normal(); };

  PipelineConfig c;
  try {
    const auto& corpus = doc.at("corpus");
    reject_unknown_keys(corpus, {"dumps", "repos", "window", "cache_dir"}, "corpus");
    for (const auto& d : corpus.value("dumps", json::array())) c.dumps.push_back(path_of(d));
    c.repos = corpus.value("repos", std::vector<std::string>{});
    if (auto w = corpus.find("window"); w != corpus.end()) {
      c.window = DateWindow{parse_date(w->at("from").get<std::string>()), parse_date(w->at("to").get<std::string>())};
    }
    if (auto cd = corpus.find("cache_dir"); cd != corpus.end()) c.cache_dir = path_of(*cd);

    c.criteria = path_of(doc.at("criteria"));
    c.vocabulary = path_of(doc.at("vocabulary"));
    c.symptom_taxonomy = path_of(doc.at("taxonomies").at("symptom"));
    c.root_cause_taxonomy = path_of(doc.at("taxonomies").at("root_cause"));
    c.gold = path_of(doc.at("gold"));

    const auto& model = doc.at("model");
    c.model_id = model.at("id").get<std::string>();
    c.max_output_tokens = model.value("max_output_tokens", c.max_output_tokens);

    c.mode = llm::gateway_mode_from_string(doc.value("mode", std::string("replay")));
    if (auto t = doc.find("transcript"); t != doc.end() && !t->is_null()) c.transcript = path_of(*t);

    if (auto s = doc.find("sampling"); s != doc.end()) {
      reject_unknown_keys(*s, {"enabled", "n_pos", "n_neg", "seed"}, "sampling");
      c.sampling_enabled = s->value("enabled", true);
      c.sampling.n_pos = s->value("n_pos", c.sampling.n_pos);
      c.sampling.n_neg = s->value("n_neg", c.sampling.n_neg);
      c.sampling.seed = s->value("seed", c.sampling.seed);
    }
    c.parallelism = doc.value("parallelism", c.parallelism);
    c.output_dir = path_of(doc.at("output_dir"));
    c.stage3_input = stage3_input_from_string(doc.value("stage3_input", std::string("stage2_positive")));

    if (auto s = doc.find("study"); s != doc.end()) {
      reject_unknown_keys(*s, {"theme", "constraints", "reference", "normalization"}, "study");
      StudySection study;
      study.theme.description = s->at("theme").get<std::string>();
      study.theme.constraints = s->value("constraints", std::vector<std::string>{});
      study.reference = path_of(s->at("reference"));
      if (auto n = s->find("normalization"); n != s->end()) study.normalization = name_normalization_from_json(*n);
      c.study = std::move(study);
    }
    if (auto l = doc.find("limits"); l != doc.end()) {
      c.limits.max_concurrent = l->value("max_concurrent", c.limits.max_concurrent);
      c.limits.requests_per_minute = l->value("requests_per_minute", c.limits.requests_per_minute);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad config: ") + e.what());
  }
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(text::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what(), path.string());
  }
  auto base = fs::absolute(path).parent_path();
  return parse_pipeline_config(doc, base);
}

json to_json(const PipelineConfig& c) {
  auto paths = [](const std::vector<fs::path>& ps) {
    json out = json::array();
    for (const auto& p : ps) out.push_back(p.generic_string());
    return out;
  };
  json corpus{{"dumps", paths(c.dumps)}, {"repos", c.repos}};
  if (c.window) corpus["window"] = {{"from", format_date(c.window->from)}, {"to", format_date(c.window->to)}};
  if (c.cache_dir) corpus["cache_dir"] = c.cache_dir->generic_string();
  json doc{{"corpus", corpus},
           {"criteria", c.criteria.generic_string()},
           {"vocabulary", c.vocabulary.generic_string()},
           {"taxonomies",
            {{"symptom", c.symptom_taxonomy.generic_string()}, {"root_cause", c.root_cause_taxonomy.generic_string()}}},
           {"gold", c.gold.generic_string()},
           {"model", {{"id", c.model_id}, {"max_output_tokens", c.max_output_tokens}}},
           {"mode", llm::to_string(c.mode)},
           {"transcript", c.transcript ? json(c.transcript->generic_string()) : json(nullptr)},
           {"sampling",
            {{"enabled", c.sampling_enabled},
             {"n_pos", c.sampling.n_pos},
             {"n_neg", c.sampling.n_neg},
             {"seed", c.sampling.seed}}},
           {"parallelism", c.parallelism},
           {"output_dir", c.output_dir.generic_string()},
           {"stage3_input", to_string(c.stage3_input)},
           {"limits",
            {{"max_concurrent", c.limits.max_concurrent}, {"requests_per_minute", c.limits.requests_per_minute}}}};
  if (c.study) {
    doc["study"] = {{"theme", c.study->theme.description},
                    {"constraints", c.study->theme.constraints},
                    {"reference", c.study->reference.generic_string()},
                    {"normalization", to_json(c.study->normalization)}};
  }
  return doc;
}

void validate(const PipelineConfig& c) {
  auto must_exist = [](const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw Error(ErrorCode::kConfig, std::string(what) + " not found: " + p.string(), p.string());
  };
  if (c.dumps.empty() && c.repos.empty()) throw Error(ErrorCode::kConfig, "corpus needs dumps or repos");
  if (!c.repos.empty() && c.dumps.empty() && !c.window) throw Error(ErrorCode::kConfig, "corpus.window required for repos");
  for (const auto& d : c.dumps) must_exist(d, "dump");
  must_exist(c.criteria, "criteria file");
  must_exist(c.vocabulary, "vocabulary file");
  must_exist(c.symptom_taxonomy, "symptom taxonomy");
  must_exist(c.root_cause_taxonomy, "root-cause taxonomy");
  must_exist(c.gold, "gold file");
  if (c.study) must_exist(c.study->reference, "reference list");
  if (c.model_id.empty()) throw Error(ErrorCode::kConfig, "model.id is empty");
  if (c.mode != llm::GatewayMode::kLive && !c.transcript) {
    throw Error(ErrorCode::kConfig, std::string(llm::to_string(c.mode)) + " mode requires a transcript path");
  }
  if (c.mode == llm::GatewayMode::kReplay) must_exist(*c.transcript, "transcript");
  if (c.parallelism < 1) throw Error(ErrorCode::kConfig, "parallelism must be >= 1");
  if (c.max_output_tokens < 1) throw Error(ErrorCode::kConfig, "model.max_output_tokens must be >= 1");
  if (c.output_dir.empty()) throw Error(ErrorCode::kConfig, "output_dir is empty");
}

void apply(PipelineConfig& c, const ConfigOverrides& o) {
  if (o.mode) c.mode = *o.mode;
  if (o.model_id) c.model_id = *o.model_id;
  if (o.seed) c.sampling.seed = *o.seed;
  if (o.parallelism) c.parallelism = *o.parallelism;
  if (o.output_dir) c.output_dir = *o.output_dir;
}

// ---------------------------------------------------------------- pipeline

namespace {

class RunLock {
 public:
  explicit RunLock(const fs::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::kIo, "cannot open lock file " + path.string(), path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::kRunLocked, "run directory is in use by another pipeline: " + path.parent_path().string(),
                  path.string());
    }
  }
  ~RunLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

std::string hash_file(const fs::path& p) { return sha256_hex(text::read_file(p)); }

std::string read_jsonl_field_error(const fs::path& p, std::size_t line, const std::string& what) {
  return p.string() + " line " + std::to_string(line) + ": " + what;
}

template <class T, class Parse>
std::vector<T> read_jsonl(const fs::path& p, Parse&& parse) {
  std::vector<T> out;
  std::size_t n = 0;
  for (const auto& line : text::split_lines(text::read_file(p))) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedDocument, read_jsonl_field_error(p, n, e.what()), p.string());
    }
  }
  return out;
}

template <class T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) out += to_json(item).dump() + "\n";
  return out;
}

}  // namespace

struct Pipeline::Impl {
  PipelineDeps deps;
  fs::path out;
  std::unique_ptr<RunLock> lock;
  std::unique_ptr<HttpTransport> owned_http;
  std::shared_ptr<llm::Transcript> transcript;
  std::unique_ptr<llm::LlmGateway> gateway;
  fs::path last_artifact;

  void log(const std::string& msg) const {
    if (deps.log) deps.log(msg);
  }

  // The chat client for LLM stages: injected, or a gateway built on first use.
  llm::LlmHandle model(const PipelineConfig& c) {
    if (deps.chat != nullptr) return llm::LlmHandle{deps.chat, c.model_id, c.max_output_tokens};
    if (!gateway) {
      if (c.mode == llm::GatewayMode::kReplay) transcript = llm::Transcript::load(*c.transcript);
      if (c.mode == llm::GatewayMode::kRecord) transcript = llm::Transcript::open_for_recording(*c.transcript);
      llm::GatewayOptions options;
      options.mode = c.mode;
      options.limits = c.limits;
      gateway = std::make_unique<llm::LlmGateway>(options, transcript, provider_factory(), deps.env, deps.sleeper);
      gateway->check_ready(c.model_id);
    }
    return llm::LlmHandle{gateway.get(), c.model_id, c.max_output_tokens};
  }

  llm::ProviderFactory provider_factory() {
    return deps.providers ? deps.providers : llm::http_provider_factory(http());
  }

  HttpTransport& http() {
    if (deps.http != nullptr) return *deps.http;
    if (!owned_http) owned_http = std::make_unique<HttplibTransport>();
    return *owned_http;
  }

  fs::path meta_path(const std::string& stage) const { return out / artifacts::kMetaDir / (stage + ".json"); }

  fs::path require(const char* name, const char* producer) const {
    auto p = out / name;
    if (!fs::exists(p)) {
      throw Error(ErrorCode::kMissingArtifact,
                  "missing artifact " + p.string() + " (produced by `faultloom " + producer + "`)", p.string());
    }
    return p;
  }

  // Runs `produce` unless the stage already completed with the same inputs.
  // Returns true when the stage was executed.
  template <class Produce>
  bool run_stage(const std::string& stage, const json& inputs, const std::vector<std::string>& outputs,
                 llm::GatewayMode mode, Produce&& produce) {
    const auto input_hash = sha256_hex(json{{"stage", stage}, {"inputs", inputs}}.dump());
    const auto meta_file = meta_path(stage);
    const auto started = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
    };
    auto note_timing = [&](bool skipped) {
      std::ofstream t(out / artifacts::kTiming, std::ios::app);
      t << json{{"stage", stage}, {"skipped", skipped}, {"wall_time_ms", elapsed_ms()}}.dump() << "\n";
    };

    if (fs::exists(meta_file)) {
      auto meta = json::parse(text::read_file(meta_file));
      if (meta.at("input_hash").get<std::string>() != input_hash) {
        throw Error(ErrorCode::kArtifactConflict,
                    "stage '" + stage + "' already completed in " + out.string() +
                        " with different inputs; artifacts are append-only, use a fresh output directory",
                    meta_file.string());
      }
      for (const auto& name : outputs) {
        auto p = out / name;
        if (!fs::exists(p) || hash_file(p) != meta.at("outputs").at(name).get<std::string>()) {
          throw Error(ErrorCode::kArtifactConflict, "artifact " + p.string() + " changed after stage '" + stage + "'",
                      p.string());
        }
      }
      log("stage " + stage + ": up to date, skipped");
      if (!outputs.empty()) last_artifact = out / outputs.back();
      note_timing(true);
      return false;
    }

    log("stage " + stage + ": running");
    try {
      produce();
    } catch (const Error& e) {
      throw Error(e.code(),
                  "stage '" + stage + "' failed: " + e.what() + " (last persisted artifact: " +
                      (last_artifact.empty() ? std::string("none") : last_artifact.string()) + ")",
                  e.subject());
    }
    json meta{{"stage", stage}, {"input_hash", input_hash}, {"outputs", json::object()}};
    for (const auto& name : outputs) meta["outputs"][name] = hash_file(out / name);
    if (mode != llm::GatewayMode::kReplay) meta["wall_time_ms"] = elapsed_ms();
    text::write_file_atomic(meta_file, meta.dump(2) + "\n");
    if (!outputs.empty()) last_artifact = out / outputs.back();
    note_timing(false);
    return true;
  }
};

Pipeline::Pipeline(PipelineConfig config, PipelineDeps deps) : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  validate(config_);
  impl_->deps = std::move(deps);
  impl_->out = config_.output_dir;
  fs::create_directories(impl_->out / artifacts::kMetaDir);
  impl_->lock = std::make_unique<RunLock>(impl_->out / artifacts::kLock);

  auto snapshot = to_json(config_).dump(2) + "\n";
  text::write_file_atomic(impl_->out / artifacts::kConfigSnapshot, snapshot);
}

Pipeline::~Pipeline() = default;

void Pipeline::check_ready() {
  if (impl_->deps.chat != nullptr || config_.mode == llm::GatewayMode::kReplay) return;
  // Building the gateway performs no network traffic.
  llm::GatewayOptions options;
  options.mode = config_.mode;
  options.limits = config_.limits;
  llm::LlmGateway probe(options, std::make_shared<llm::Transcript>(), impl_->provider_factory(), impl_->deps.env,
                        impl_->deps.sleeper);
  probe.check_ready(config_.model_id);
}

namespace {

struct Loaded {
  TaxonomyPair taxonomies;
  GoldSet gold;
};

Loaded load_reference_data(const PipelineConfig& c) {
  Loaded l{TaxonomyPair{load_taxonomy_file(c.symptom_taxonomy), load_taxonomy_file(c.root_cause_taxonomy)},
           load_gold_file(c.gold)};
  validate_gold(l.gold, &l.taxonomies.symptoms, &l.taxonomies.root_causes);
  return l;
}

FilterCriteria load_criteria(const PipelineConfig& c) {
  json doc;
  try {
    doc = json::parse(text::read_file(c.criteria));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, c.criteria.string() + ": " + e.what(), c.criteria.string());
  }
  return load_filter_criteria(doc, text::read_list_file(c.vocabulary));
}

}  // namespace

void Pipeline::ingest() {
  auto& d = *impl_;
  if (config_.repos.empty() || !config_.window) throw Error(ErrorCode::kConfig, "ingest needs corpus.repos and corpus.window");
  json inputs{{"repos", config_.repos},
              {"from", format_date(config_.window->from)},
              {"to", format_date(config_.window->to)}};
  d.run_stage("corpus", inputs, {artifacts::kCorpus}, config_.mode, [&] {
    TrackerOptions options;
    options.token = d.deps.env("FAULTLOOM_VCS_TOKEN").value_or("");
    options.cache_dir = config_.cache_dir;
    IssueTrackerClient client(d.http(), options, d.deps.sleeper);
    auto corpus = client.fetch_many(config_.repos, *config_.window, config_.parallelism);
    export_dump(corpus, d.out / artifacts::kCorpus);
    d.log("ingested " + std::to_string(corpus.size()) + " issues");
  });
}

void Pipeline::import_dumps() {
  auto& d = *impl_;
  if (config_.dumps.empty()) throw Error(ErrorCode::kConfig, "import needs corpus.dumps");
  json inputs = json::array();
  for (const auto& p : config_.dumps) inputs.push_back(hash_file(p));
  d.run_stage("corpus", inputs, {artifacts::kCorpus}, llm::GatewayMode::kReplay, [&] {
    std::vector<Corpus> parts;
    for (const auto& p : config_.dumps) parts.push_back(import_dump(p));
    auto corpus = merge(parts);
    export_dump(corpus, d.out / artifacts::kCorpus);
    d.log("imported " + std::to_string(corpus.size()) + " issues");
  });
}

void Pipeline::sample() {
  auto& d = *impl_;
  auto corpus_path = d.require(artifacts::kCorpus, "import");
  json inputs{{"corpus", hash_file(corpus_path)},
              {"gold", hash_file(config_.gold)},
              {"enabled", config_.sampling_enabled},
              {"n_pos", config_.sampling.n_pos},
              {"n_neg", config_.sampling.n_neg},
              {"seed", config_.sampling.seed}};
  d.run_stage("sample", inputs, {artifacts::kSample}, llm::GatewayMode::kReplay, [&] {
    auto corpus = parse_dump(text::read_file(corpus_path));
    if (config_.sampling_enabled) {
      auto gold = load_gold_file(config_.gold);
      corpus = sample_balanced(corpus, gold, config_.sampling);
    }
    export_dump(corpus, d.out / artifacts::kSample);
    d.log("sampled " + std::to_string(corpus.size()) + " issues");
  });
}

namespace {

json model_inputs(const PipelineConfig& c) {
  return json{{"model_id", c.model_id}, {"max_output_tokens", c.max_output_tokens}};
}

}  // namespace

void Pipeline::define() {
  auto& d = *impl_;
  if (!config_.study) throw Error(ErrorCode::kConfig, "define needs a study section in the config");
  const auto& study = *config_.study;
  json inputs{{"theme", study.theme.description},
              {"constraints", study.theme.constraints},
              {"reference", hash_file(study.reference)},
              {"normalization", to_json(study.normalization)},
              {"model", model_inputs(config_)}};
  d.run_stage("define", inputs, {artifacts::kStudyPlan, artifacts::kStudyScore}, config_.mode, [&] {
    auto result = propose_study(study.theme, d.model(config_), study.normalization);
    auto score = score_plan(result.plan, load_reference_list(study.reference), study.normalization);
    text::write_file_atomic(d.out / artifacts::kStudyPlan, to_json(result.plan).dump(2) + "\n");
    json score_doc = to_json(score);
    score_doc["attempts"] = result.attempts;
    score_doc["usage"] = llm::to_json(result.usage);
    text::write_file_atomic(d.out / artifacts::kStudyScore, score_doc.dump(2) + "\n");
    d.log("study plan: " + std::to_string(result.plan.projects.size()) + " projects, recall " +
          score.recall.to_string());
  });
}

void Pipeline::filter() {
  auto& d = *impl_;
  auto sample_path = d.require(artifacts::kSample, "sample");
  auto criteria = load_criteria(config_);
  json inputs{{"sample", hash_file(sample_path)}, {"criteria", to_json(criteria)}, {"model", model_inputs(config_)}};
  d.run_stage("filter", inputs, {artifacts::kDecisions}, config_.mode, [&] {
    auto sample = parse_dump(text::read_file(sample_path));
    auto decisions = run_stage2(sample, criteria, d.model(config_), config_.parallelism);
    text::write_file_atomic(d.out / artifacts::kDecisions, to_jsonl(decisions));
    std::size_t positive = 0, errors = 0;
    for (const auto& dec : decisions) {
      positive += dec.final ? 1 : 0;
      errors += dec.error ? 1 : 0;
    }
    d.log("filtered " + std::to_string(decisions.size()) + " issues: " + std::to_string(positive) +
          " fault-related, " + std::to_string(errors) + " errors");
  });
}

namespace {

std::vector<IssueRecord> stage3_inputs(const PipelineConfig& c, const fs::path& out, const GoldSet& gold) {
  std::vector<IssueRecord> issues;
  if (c.stage3_input == Stage3Input::kStage2Positive) {
    auto sample = parse_dump(text::read_file(out / artifacts::kSample));
    auto decisions = read_jsonl<FilterDecision>(out / artifacts::kDecisions,
                                                [](const json& j) { return filter_decision_from_json(j); });
    for (const auto& dec : decisions) {
      if (!dec.final) continue;
      if (const auto* r = sample.find(dec.key)) issues.push_back(*r);
    }
  } else {
    auto corpus = parse_dump(text::read_file(out / artifacts::kCorpus));
    for (const auto& r : corpus.records()) {
      const auto* g = gold.find(r.key());
      if (g != nullptr && (g->symptom_leaf || g->root_cause)) issues.push_back(r);
    }
  }
  return issues;
}

}  // namespace

void Pipeline::classify() {
  auto& d = *impl_;
  json inputs{{"wiring", to_string(config_.stage3_input)},
              {"symptom_taxonomy", hash_file(config_.symptom_taxonomy)},
              {"root_cause_taxonomy", hash_file(config_.root_cause_taxonomy)},
              {"criteria", hash_file(config_.criteria)},
              {"model", model_inputs(config_)}};
  if (config_.stage3_input == Stage3Input::kStage2Positive) {
    inputs["sample"] = hash_file(d.require(artifacts::kSample, "sample"));
    inputs["decisions"] = hash_file(d.require(artifacts::kDecisions, "filter"));
  } else {
    inputs["corpus"] = hash_file(d.require(artifacts::kCorpus, "import"));
    inputs["gold"] = hash_file(config_.gold);
  }
  d.run_stage("classify", inputs, {artifacts::kLabels}, config_.mode, [&] {
    auto ref = load_reference_data(config_);
    auto issues = stage3_inputs(config_, d.out, ref.gold);
    std::vector<FaultLabel> labels;
    if (!issues.empty()) {
      labels = run_stage3(issues, ref.taxonomies, d.model(config_), config_.parallelism,
                          load_criteria(config_).budget);
    }
    text::write_file_atomic(d.out / artifacts::kLabels, to_jsonl(labels));
    std::size_t valid = 0;
    for (const auto& l : labels) valid += l.valid ? 1 : 0;
    d.log("classified " + std::to_string(labels.size()) + " issues, " + std::to_string(valid) + " valid");
  });
}

namespace {

// Pure function of the run directory's artifacts and the reference data.
EvalReport build_report(const PipelineConfig& c, const fs::path& out) {
  auto ref = load_reference_data(c);
  EvalReport report;
  auto& meta = report.run_meta;
  meta.mode = std::string(llm::to_string(c.mode));
  meta.model_id = c.model_id;

  auto add_usage = [&](const llm::Usage& u) { meta.total += u; };

  if (fs::exists(out / artifacts::kStudyScore)) {
    auto score_doc = json::parse(text::read_file(out / artifacts::kStudyScore));
    auto plan_doc = json::parse(text::read_file(out / artifacts::kStudyPlan));
    Stage1Scores s1;
    s1.proposed_projects = static_cast<std::int64_t>(plan_doc.at("projects").size());
    s1.research_questions = static_cast<std::int64_t>(plan_doc.at("research_questions").size());
    const auto& recall = score_doc.at("recall");
    auto frac = recall.at("fraction").get<std::string>();
    auto slash = frac.find('/');
    s1.plan.recall = Ratio(std::stoll(frac.substr(0, slash)), std::stoll(frac.substr(slash + 1)));
    s1.plan.hits = score_doc.at("hits").get<std::vector<std::string>>();
    s1.plan.misses = score_doc.at("misses").get<std::vector<std::string>>();
    s1.plan.extras = score_doc.at("extras").get<std::vector<std::string>>();
    add_usage(llm::usage_from_json(score_doc.at("usage")));
    report.stage1 = std::move(s1);
  }

  auto corpus = parse_dump(text::read_file(out / artifacts::kCorpus));
  auto sample = parse_dump(text::read_file(out / artifacts::kSample));
  meta.counts["corpus"] = static_cast<std::int64_t>(corpus.size());
  meta.counts["sampled"] = static_cast<std::int64_t>(sample.size());

  auto decisions =
      read_jsonl<FilterDecision>(out / artifacts::kDecisions, [](const json& j) { return filter_decision_from_json(j); });
  std::int64_t positives = 0, stage2_errors = 0;
  for (const auto& d : decisions) {
    add_usage(d.usage);
    positives += d.final ? 1 : 0;
    stage2_errors += d.error ? 1 : 0;
  }
  meta.counts["stage2_decisions"] = static_cast<std::int64_t>(decisions.size());
  meta.counts["stage2_fault_related"] = positives;
  meta.counts["stage2_errors"] = stage2_errors;
  if (!decisions.empty()) report.stage2 = score_stage2(decisions, ref.gold, MissingGold::kExclude);

  auto labels = read_jsonl<FaultLabel>(out / artifacts::kLabels, [](const json& j) { return fault_label_from_json(j); });
  std::int64_t stage3_errors = 0;
  for (const auto& l : labels) {
    add_usage(l.usage);
    meta.invalid_labels += l.valid ? 0 : 1;
    stage3_errors += l.error ? 1 : 0;
  }
  meta.counts["stage3_labels"] = static_cast<std::int64_t>(labels.size());
  meta.counts["stage3_errors"] = stage3_errors;

  auto score_taxonomy = [&](const Taxonomy& t) -> std::optional<Stage3Scores> {
    try {
      return score_stage3(labels, ref.gold, t, t.leaf_level(), MissingGold::kExclude);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNothingToScore) throw;
      return std::nullopt;
    }
  };
  report.stage3_symptom = score_taxonomy(ref.taxonomies.symptoms);
  report.stage3_root_cause = score_taxonomy(ref.taxonomies.root_causes);

  if (labels.empty()) {
    meta.notes.push_back("Stage III received 0 issues (wiring: " + std::string(to_string(c.stage3_input)) +
                         "); its sections are empty.");
  }
  meta.notes.push_back("Stage III input wiring: " + std::string(to_string(c.stage3_input)) + ".");
  meta.notes.push_back(
      "Vocabulary terms match case-insensitively on whole words (punctuated terms as bounded literals) over title, "
      "body and comments.");
  meta.notes.push_back("Issues without a gold value are excluded from scoring and counted per stage.");

  if (meta.total.calls > 0) meta.per_model[c.model_id] = meta.total;

  std::optional<std::int64_t> wall;
  for (const char* stage : {"corpus", "sample", "define", "filter", "classify"}) {
    auto p = out / artifacts::kMetaDir / (std::string(stage) + ".json");
    if (!fs::exists(p)) continue;
    auto m = json::parse(text::read_file(p));
    if (auto w = m.find("wall_time_ms"); w != m.end()) wall = wall.value_or(0) + w->get<std::int64_t>();
  }
  meta.wall_time_ms = wall;
  return report;
}

}  // namespace

EvalReport Pipeline::evaluate() {
  auto& d = *impl_;
  json inputs{{"sample", hash_file(d.require(artifacts::kSample, "sample"))},
              {"decisions", hash_file(d.require(artifacts::kDecisions, "filter"))},
              {"labels", hash_file(d.require(artifacts::kLabels, "classify"))},
              {"gold", hash_file(config_.gold)},
              {"symptom_taxonomy", hash_file(config_.symptom_taxonomy)},
              {"root_cause_taxonomy", hash_file(config_.root_cause_taxonomy)}};
  if (fs::exists(d.out / artifacts::kStudyScore)) inputs["study"] = hash_file(d.out / artifacts::kStudyScore);
  EvalReport report;
  bool built = false;
  d.run_stage("evaluate", inputs, {artifacts::kEvaluation}, llm::GatewayMode::kReplay, [&] {
    report = build_report(config_, d.out);
    built = true;
    text::write_file_atomic(d.out / artifacts::kEvaluation, render_report_json(report));
  });
  if (!built) report = build_report(config_, d.out);
  return report;
}

EvalReport Pipeline::report() {
  auto& d = *impl_;
  auto evaluation = d.require(artifacts::kEvaluation, "evaluate");
  auto report = build_report(config_, d.out);
  if (render_report_json(report) != text::read_file(evaluation)) {
    throw Error(ErrorCode::kArtifactConflict,
                "artifacts no longer reproduce " + evaluation.string() + "; rerun in a fresh output directory",
                evaluation.string());
  }
  write_report(report, d.out);
  d.log("report written to " + d.out.string());
  return report;
}

EvalReport Pipeline::run() {
  check_ready();
  if (!config_.dumps.empty()) {
    import_dumps();
  } else {
    ingest();
  }
  sample();
  if (config_.study) define();
  filter();
  classify();
  evaluate();
  return report();
}

}  // namespace faultloom
