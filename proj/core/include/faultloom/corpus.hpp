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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faultloom/issue.hpp"
#include "faultloom/taxonomy.hpp"
#include "faultloom/time.hpp"

namespace faultloom {

enum class CorpusSource { kLive, kDump };

struct CorpusProvenance {
  CorpusSource source = CorpusSource::kDump;
  Timestamp fetched_at{};
};

// An ordered collection of validated issue records with unique (repo, number).
class Corpus {
 public:
  Corpus() = default;
  // Validates every record and rejects duplicate keys.
  explicit Corpus(std::vector<IssueRecord> records, CorpusProvenance provenance = {});

  const std::vector<IssueRecord>& records() const { return records_; }
  const CorpusProvenance& provenance() const { return provenance_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const IssueRecord* find(const IssueKey& key) const;

 private:
  std::vector<IssueRecord> records_;
  CorpusProvenance provenance_;
  std::unordered_map<IssueKey, std::size_t, IssueKeyHash> index_;
};

// One JSON object per line. Errors carry the 1-based line number in the message.
Corpus parse_dump(std::string_view contents, CorpusProvenance provenance = {});
Corpus import_dump(const std::filesystem::path& path);
std::string serialize_dump(const Corpus& corpus);
void export_dump(const Corpus& corpus, const std::filesystem::path& path);

// Concatenates corpora; duplicate keys across inputs are an error.
Corpus merge(const std::vector<Corpus>& parts);

struct GoldLabel {
  IssueKey key;
  std::optional<bool> fault_related;
  std::optional<std::string> symptom_leaf;  // symptom taxonomy node id
  std::optional<std::string> root_cause;    // root-cause taxonomy node id
};

class GoldSet {
 public:
  void add(GoldLabel label);
  const GoldLabel* find(const IssueKey& key) const;
  const std::vector<GoldLabel>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<GoldLabel> labels_;
  std::unordered_map<IssueKey, std::size_t, IssueKeyHash> index_;
};

// Delimited table with header: repo,number,fault_related,symptom_leaf_id,root_cause_id.
// Empty cells mean "not annotated".
GoldSet parse_gold_csv(std::string_view contents);
GoldSet load_gold_file(const std::filesystem::path& path);
std::string serialize_gold_csv(const GoldSet& gold);

// Every populated taxonomy id must resolve in the matching taxonomy.
void validate_gold(const GoldSet& gold, const Taxonomy* symptoms, const Taxonomy* root_causes);

}  // namespace faultloom
