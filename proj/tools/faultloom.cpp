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

// faultloom <subcommand> --config <path> [overrides]
//
// Subcommands run a single stage against the run directory, or the whole
// pipeline with `run`. Exit status: 0 success, 1 pipeline error, 2 usage.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "faultloom/error.hpp"
#include "faultloom/pipeline.hpp"
#include "faultloom/report.hpp"

namespace {

struct Options {
  std::string config;
  std::string mode;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::string out;
  bool quiet = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config, "Pipeline config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--mode", o.mode, "Gateway mode")->check(CLI::IsMember({"live", "record", "replay"}));
  sub->add_option("--model", o.model, "Model id, provider/model");
  sub->add_option("--seed", o.seed, "Sampling seed");
  sub->add_option("--parallelism", o.parallelism, "Concurrent issues per stage")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "Run directory");
  sub->add_flag("-q,--quiet", o.quiet, "Only print errors");
}

faultloom::PipelineConfig resolve(const Options& o) {
  auto config = faultloom::load_pipeline_config(o.config);
  faultloom::ConfigOverrides ov;
  if (!o.mode.empty()) ov.mode = faultloom::llm::gateway_mode_from_string(o.mode);
  if (!o.model.empty()) ov.model_id = o.model;
  ov.seed = o.seed;
  ov.parallelism = o.parallelism;
  if (!o.out.empty()) ov.output_dir = std::filesystem::absolute(o.out);
  faultloom::apply(config, ov);
  return config;
}

void print_headline(const faultloom::EvalReport& r) {
  auto line = [](const char* what, const faultloom::Ratio& v) {
    std::cout << what << ": " << v.to_string() << " (" << v.value() << ")\n";
  };
  if (r.stage1) line("stage1 reference recall", r.stage1->plan.recall);
  if (r.stage2) line("stage2 accuracy", r.stage2->accuracy);
  if (r.stage3_symptom) line("stage3 symptom accuracy", r.stage3_symptom->accuracy);
  if (r.stage3_root_cause) line("stage3 root-cause accuracy", r.stage3_root_cause->accuracy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faultloom: LLM-assisted empirical fault-study pipeline"};
  app.require_subcommand(1);
  Options opts;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"ingest", "Fetch issues from the configured repositories"},
      {"import", "Import issue dumps"},
      {"sample", "Draw the balanced evaluation sample"},
      {"define", "Stage I: propose a study plan and score it"},
      {"filter", "Stage II: filter fault-related issues"},
      {"classify", "Stage III: label symptoms and root causes"},
      {"evaluate", "Score stage outputs against gold labels"},
      {"report", "Write report files from a finished run"},
      {"run", "Run every stage in order"},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), opts);

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    faultloom::PipelineDeps deps;
    if (!opts.quiet) deps.log = [](const std::string& m) { std::cerr << "faultloom: " << m << "\n"; };
    faultloom::Pipeline pipeline(resolve(opts), std::move(deps));

    if (cmd == "ingest") {
      pipeline.ingest();
    } else if (cmd == "import") {
      pipeline.import_dumps();
    } else if (cmd == "sample") {
      pipeline.sample();
    } else if (cmd == "define") {
      pipeline.check_ready();
      pipeline.define();
    } else if (cmd == "filter") {
      pipeline.check_ready();
      pipeline.filter();
    } else if (cmd == "classify") {
      pipeline.check_ready();
      pipeline.classify();
    } else if (cmd == "evaluate") {
      print_headline(pipeline.evaluate());
    } else if (cmd == "report") {
      pipeline.report();
    } else {
      print_headline(pipeline.run());
    }
  } catch (const faultloom::Error& e) {
    std::cerr << "faultloom: error [" << faultloom::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "faultloom: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
