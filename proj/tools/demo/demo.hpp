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

// Synthetic study material and a scripted model, used to build the shipped
// demo fixtures and by the test suite. Everything here is deterministic in
// its seed.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "faultloom/classify.hpp"
#include "faultloom/corpus.hpp"
#include "faultloom/llm/chat.hpp"
#include "faultloom/llm/providers.hpp"
#include "faultloom/time.hpp"

namespace faultloom::demo {

struct SyntheticSpec {
  std::size_t positives = 300;
  std::size_t negatives = 300;
  std::uint64_t seed = 2025;
  std::vector<std::string> repos{"tensorflow/tfjs", "tensorflow/tfjs-models"};
  Date cutoff = parse_date("2018-03-01");
};

// Why a gold-negative issue is not fault-related.
enum class NegativeKind { kFeatureRequest, kNoVocabulary, kUnanswered, kBeforeCutoff, kDiscussion };

struct SyntheticStudy {
  Corpus corpus;
  GoldSet gold;
};

SyntheticStudy make_synthetic_study(const SyntheticSpec& spec, const TaxonomyPair& taxonomies);

std::vector<std::string> demo_vocabulary();
nlohmann::json demo_criteria(const SyntheticSpec& spec);
std::vector<std::string> demo_reference();
std::string demo_theme();
std::vector<std::string> demo_constraints();

enum class Behaviour {
  kPerfect,      // always the gold answer in the first reply
  kRealistic,    // deterministic mix of mistakes, repairs and failures
  kAdversarial,  // malformed, non-leaf and unknown labels, some never repaired
};

// Answers every faultloom prompt (study definition, filter, classification)
// from the gold set. Choices depend only on the issue key and the prompt, so
// replies are stable across runs and thread schedules.
class ScriptedModel final : public llm::ChatClient {
 public:
  ScriptedModel(Behaviour behaviour, const GoldSet& gold, const TaxonomyPair& taxonomies,
                std::vector<std::string> reference = demo_reference());

  llm::ChatResponse complete(const llm::ChatRequest& request) override;
  std::string reply_text(const llm::ChatRequest& request) const;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::string stage1_reply() const;
  std::string stage2_reply(const IssueKey& key, bool repair) const;
  std::string stage3_reply(const IssueKey& key, bool repair) const;

  Behaviour behaviour_;
  const GoldSet& gold_;
  const TaxonomyPair& taxonomies_;
  std::vector<std::string> reference_;
  std::atomic<std::size_t> calls_{0};
};

// Adapts a ChatClient to the raw-provider interface so it can sit behind the
// gateway (record mode, retries, usage tallies).
class ClientProvider final : public llm::Provider {
 public:
  explicit ClientProvider(llm::ChatClient& client) : client_(client) {}
  llm::ChatResponse send(const llm::ChatRequest& request) override { return client_.complete(request); }

 private:
  llm::ChatClient& client_;
};

// Stable 32-bit hash of an issue key, the basis of scripted choices.
std::uint32_t key_hash(const IssueKey& key);

// Writes corpus.jsonl, gold.csv, vocabulary.txt, criteria.json,
// reference.txt, faultloom.json and transcript.jsonl into `dir`. The
// transcript is recorded by running the pipeline in record mode against a
// realistic scripted model.
void write_demo_fixtures(const std::filesystem::path& dir, const std::filesystem::path& taxonomy_dir);

}  // namespace faultloom::demo
