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

#include <algorithm>
#include <map>

#include "demo.hpp"
#include "faultloom/hashing.hpp"
#include "faultloom/sampling.hpp"

namespace faultloom::demo {

namespace {

struct Phrase {
  const char* title;
  const char* detail;
};

// Keyed by node name; covers every assignable symptom class.
const std::map<std::string, Phrase>& symptom_phrases() {
  static const std::map<std::string, Phrase> m{
      {"DL Operator Exception", {"Kernel not registered for op on the active backend",
                                 "Running the model throws an error saying the kernel for this op is not registered for backend 'webgl'."}},
      {"Function Inaccessible", {"Method is not a function after upgrading",
                                 "Calling the helper now throws 'TypeError: x is not a function'; the method seems no longer exported."}},
      {"Invalid Argument Type", {"Argument dtype rejected by op",
                                 "The op fails with an error that the argument must be float32 but got int32."}},
      {"Undefined Property Access", {"Cannot read properties of undefined in layer call",
                                     "We get 'Cannot read properties of undefined (reading shape)' deep inside the layer code."}},
      {"Shape Mismatch", {"Error when checking input: expected shape differs",
                          "model.predict fails: expected input to have shape [null,224,224,3] but got array with shape [1,3,224,224]."}},
      {"Value Out of Range", {"Index out of range in gather",
                              "gather throws a RangeError because an index is larger than the axis size."}},
      {"Model Fetch Failure", {"loadGraphModel fails to fetch model.json",
                               "Loading the model from the CDN fails with a network error and the model.json request returns 404."}},
      {"Weight Fetch Failure", {"Weight shards fail to download",
                                "The group1-shard2of4.bin request fails, so loading aborts with an error about missing weights."}},
      {"WebGL Context Lost", {"WebGL context lost during inference",
                              "After a few predictions the console shows 'WebGL context lost' and everything stops."}},
      {"Page Unresponsive", {"Tab freezes while training",
                             "The browser reports the page as unresponsive and eventually kills the tab during fit()."}},
      {"Slow Inference", {"Inference is much slower than expected",
                          "predict takes 900ms per frame on the GPU backend, ten times slower than the Python version."}},
      {"Slow Training", {"Training is very slow on the webgl backend",
                         "Each epoch of fit() takes minutes even for a tiny dense model."}},
      {"Memory Leak", {"Memory keeps growing in predict loop",
                       "tf.memory().numTensors grows on every iteration although we dispose the outputs; GPU memory leaks until the tab crashes."}},
      {"Out of Memory", {"Out of memory when allocating texture",
                         "The allocation fails with an out of memory error for a batch of 64 images."}},
      {"Build Failure", {"Bundling fails with the latest release",
                         "webpack build fails with an error resolving a module from the package."}},
      {"Installation Failure", {"npm install fails for node bindings",
                                "Installing the node package fails with an error while downloading the native binary."}},
      {"Backend Initialization Failure", {"Backend fails to initialize",
                                          "setBackend('wasm') rejects with an error and the backend never becomes ready."}},
      {"Model Loading Failure", {"Converted model fails to load",
                                 "loadLayersModel fails with an error about an unknown layer class while deserializing."}},
      {"NaN Output", {"Model outputs NaN after a few steps",
                      "The loss becomes NaN after the second batch and all predictions are NaN."}},
      {"Incorrect Computation Result", {"Op returns wrong values",
                                        "The result of the op is incorrect compared with numpy for the same inputs."}},
      {"Inconsistency Across Backends", {"Different results on cpu and webgl backends",
                                         "The same model gives different predictions on the cpu and webgl backends."}},
      {"Unexpected Display Behavior", {"toPixels draws a corrupted image",
                                       "Drawing the tensor to a canvas shows a wrong, striped image."}},
      {"Documentation Mismatch", {"API docs show the wrong signature",
                                  "The documented example fails with an error because the argument order in the docs is wrong."}},
  };
  return m;
}

const std::map<std::string, const char*>& cause_hints() {
  static const std::map<std::string, const char*> m{
      {"API Misuse", "A maintainer pointed to an internal call passing the wrong arguments."},
      {"Incorrect Code Logic", "The maintainers traced it to a logic bug in the implementation."},
      {"Unimplemented Operator", "The op simply has no implementation for this backend yet."},
      {"Inconsistent Modules in TF.js", "The core and converter packages disagree about the op attributes."},
      {"Improper Exception Handling", "The underlying error is swallowed and replaced by a misleading message."},
      {"Improper Memory Management", "Intermediate tensors are never disposed inside the library."},
      {"Incorrect Build Configuration", "The published bundle was built with the wrong module settings."},
      {"Incorrect Runtime Configuration", "A default flag value turned out to be wrong for this environment."},
      {"Dependency Version Mismatch", "Mixing package versions 3.x and 4.x triggers it."},
      {"Missing Dependency", "A required peer package is not installed by default."},
      {"Incorrect Data Format", "The input image data is in channels-first layout."},
      {"Unsupported Model Format", "The saved model uses a layer type that is not supported."},
      {"Model Conversion Error", "The converter wrote an incorrect weight manifest."},
      {"Browser Incompatibility", "It only happens in Safari."},
      {"Device Incompatibility", "It only happens on some mobile GPUs."},
      {"Node.js Runtime Incompatibility", "It only happens on an older Node.js runtime."},
      {"Backend Limitation", "The backend cannot represent values this large in half precision."},
      {"Unknown", "Nobody could reproduce it so far."},
  };
  return m;
}

const char* kRoles[] = {"MEMBER", "CONTRIBUTOR", "NONE", "COLLABORATOR"};

struct Draft {
  IssueRecord record;
  std::optional<GoldLabel> label;
};

Timestamp random_time(PortableRng& rng, Timestamp from, Timestamp to) {
  auto span = static_cast<std::uint64_t>((to - from).count());
  return from + std::chrono::seconds(static_cast<std::int64_t>(rng.below(span)));
}

void add_comments(IssueRecord& r, PortableRng& rng, std::size_t n, const std::vector<std::string>& texts) {
  Timestamp t = r.created_at;
  for (std::size_t i = 0; i < n; ++i) {
    t += std::chrono::seconds(600 + static_cast<std::int64_t>(rng.below(5 * 24 * 3600)));
    r.comments.push_back({kRoles[rng.below(4)], t, texts[i % texts.size()]});
  }
  r.updated_at = r.comments.empty() ? r.created_at + std::chrono::hours(1) : t;
  if (rng.below(3) != 0) {
    r.state = IssueState::kClosed;
    r.closed_at = r.updated_at + std::chrono::hours(2);
    r.updated_at = *r.closed_at;
  }
}

}  // namespace

std::uint32_t key_hash(const IssueKey& key) {
  return static_cast<std::uint32_t>(std::stoul(sha256_hex(key.to_string()).substr(0, 8), nullptr, 16));
}

std::vector<std::string> demo_vocabulary() {
  return {"bug",       "crash",      "crashes",   "error",     "exception", "fail",      "fails",
          "failed",    "failure",    "freeze",    "freezes",   "hang",      "leak",      "leaks",
          "nan",       "slow",       "slower",    "broken",    "incorrect", "wrong",     "undefined",
          "unresponsive", "corrupted", "404",     "typeerror", "rangeerror", "out of memory", "not registered"};
}

nlohmann::json demo_criteria(const SyntheticSpec& spec) {
  return {{"cutoff_date", format_date(spec.cutoff)},
          {"exclusion_labels", {"type:feature", "type:support"}},
          {"require_answered", true},
          {"comment_budget", {{"max_comments", 20}, {"max_chars", 8000}, {"max_body_chars", 8000}}}};
}

std::vector<std::string> demo_reference() {
  return {"TensorFlow.js", "third-party DL libraries", "58 JavaScript-based DL applications"};
}

std::string demo_theme() {
  return "Faults in JavaScript-based deep learning: how they manifest and what causes them.";
}

std::vector<std::string> demo_constraints() {
  return {"Projects must be open source with a public issue tracker.",
          "Focus on deep learning that runs in browsers or Node.js."};
}

SyntheticStudy make_synthetic_study(const SyntheticSpec& spec, const TaxonomyPair& taxonomies) {
  PortableRng rng(spec.seed);
  const auto symptom_leaves = taxonomies.symptoms.leaves();
  const auto cause_leaves = taxonomies.root_causes.leaves();
  const Timestamp cutoff{spec.cutoff.time_since_epoch()};
  const Timestamp early = cutoff - std::chrono::hours(24 * 200);
  const Timestamp late{parse_date("2023-12-31").time_since_epoch()};
  const Timestamp after_cutoff = cutoff + std::chrono::hours(24);

  std::vector<Draft> drafts;
  auto new_record = [&](Timestamp from, Timestamp to) {
    IssueRecord r;
    r.repo = spec.repos[rng.below(10) < 8 ? 0 : rng.below(spec.repos.size())];
    r.created_at = random_time(rng, from, to);
    return r;
  };

  for (std::size_t i = 0; i < spec.positives; ++i) {
    const auto* s = symptom_leaves[rng.below(symptom_leaves.size())];
    const auto* c = cause_leaves[rng.below(cause_leaves.size())];
    const auto& phrase = symptom_phrases().at(s->name);
    auto r = new_record(after_cutoff, late);
    r.title = phrase.title;
    r.body = std::string("Describe the problem\n") + phrase.detail +
             "\n\nSystem information\n- version: 4." + std::to_string(rng.below(20)) + ".0\n- browser: Chrome " +
             std::to_string(90 + rng.below(30)) + "\n\nThis looks like a bug in the library.";
    r.labels = {"type:bug"};
    if (rng.below(2) == 0) r.labels.push_back("comp:core");
    add_comments(r, rng, 1 + rng.below(4),
                 {"Thanks for the report. Can you share a minimal reproduction?",
                  std::string(cause_hints().at(c->name)) + " A fix is in progress.",
                  "Confirmed, I can reproduce this.", "This should be fixed in the next release."});
    drafts.push_back({std::move(r), GoldLabel{{}, true, s->id, c->id}});
  }

  for (std::size_t i = 0; i < spec.negatives; ++i) {
    const auto kind = static_cast<NegativeKind>(i % 5);
    IssueRecord r;
    switch (kind) {
      case NegativeKind::kFeatureRequest:
        r = new_record(after_cutoff, late);
        r.title = "Feature request: support for a new op";
        r.body = "It would be great to have this op. Currently converting such models gives an error.";
        r.labels = {"type:feature"};
        add_comments(r, rng, 1 + rng.below(3), {"We would welcome a contribution for this.", "+1"});
        break;
      case NegativeKind::kNoVocabulary:
        r = new_record(after_cutoff, late);
        r.title = "How can I load a saved model from IndexedDB in a web worker?";
        r.body = "I would like to know the recommended approach for keeping a model in the browser between visits. Thanks!";
        r.labels = {};
        add_comments(r, rng, 1 + rng.below(3),
                     {"You can use loadLayersModel with the indexeddb:// scheme.", "That works for me, thank you."});
        break;
      case NegativeKind::kUnanswered:
        r = new_record(after_cutoff, late);
        r.title = "predict gives an error with my model";
        r.body = "I get an error when calling predict. Not sure what is going on.";
        r.labels = {"type:bug"};
        add_comments(r, rng, 0, {});
        break;
      case NegativeKind::kBeforeCutoff:
        r = new_record(early, cutoff - std::chrono::hours(24));
        r.title = "Crash in early preview build";
        r.body = "The preview build throws an error on load.";
        r.labels = {};
        add_comments(r, rng, 1 + rng.below(2), {"Please try the first public release."});
        break;
      case NegativeKind::kDiscussion:
        r = new_record(after_cutoff, late);
        r.title = "Best practice for reporting error messages to users?";
        r.body = "In our app we want to show a friendly message when any error happens in the model pipeline. "
                 "What do other people do?";
        r.labels = {};
        add_comments(r, rng, 1 + rng.below(3),
                     {"We wrap every call in try/catch and log the error.", "A global handler works well for us."});
        break;
    }
    drafts.push_back({std::move(r), GoldLabel{{}, false, std::nullopt, std::nullopt}});
  }

  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.record.created_at < b.record.created_at; });
  std::map<std::string, std::int64_t> next_number;
  SyntheticStudy study;
  std::vector<IssueRecord> records;
  for (auto& d : drafts) {
    auto& r = d.record;
    r.number = (next_number[r.repo] += 1 + static_cast<std::int64_t>(rng.below(3)));
    r.url = "https://github.com/" + r.repo + "/issues/" + std::to_string(r.number);
    d.label->key = r.key();
    study.gold.add(*d.label);
    records.push_back(std::move(r));
  }
  study.corpus = Corpus(std::move(records));
  return study;
}

}  // namespace faultloom::demo
