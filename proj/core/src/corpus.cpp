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

#include "faultloom/corpus.hpp"

#include <charconv>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"
#include "faultloom/text.hpp"

namespace faultloom {

using nlohmann::json;

Corpus::Corpus(std::vector<IssueRecord> records, CorpusProvenance provenance)
    : records_(std::move(records)), provenance_(provenance) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate(records_[i]);
    auto key = records_[i].key();
    if (!index_.emplace(key, i).second) {
      throw Error(ErrorCode::kDuplicateKey, "duplicate issue " + key.to_string(), key.to_string());
    }
  }
}

const IssueRecord* Corpus::find(const IssueKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &records_[it->second];
}

Corpus parse_dump(std::string_view contents, CorpusProvenance provenance) {
  std::vector<IssueRecord> records;
  std::unordered_map<IssueKey, std::size_t, IssueKeyHash> first_line;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(contents)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    try {
      auto record = issue_from_json(json::parse(line));
      validate(record);
      auto [it, inserted] = first_line.emplace(record.key(), line_no);
      if (!inserted) {
        auto key = record.key().to_string();
        throw Error(ErrorCode::kDuplicateKey,
                    "duplicate issue " + key + " (first seen on line " + std::to_string(it->second) + ")", key);
      }
      records.push_back(std::move(record));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedRecord, where + "not a JSON object: " + e.what(),
                  "line " + std::to_string(line_no));
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what(), e.subject().empty() ? "line " + std::to_string(line_no) : e.subject());
    }
  }
  return Corpus(std::move(records), provenance);
}

Corpus import_dump(const std::filesystem::path& path) {
  CorpusProvenance provenance{CorpusSource::kDump, {}};
  std::error_code ec;
  auto mtime = std::filesystem::last_write_time(path, ec);
  if (!ec) {
    provenance.fetched_at = std::chrono::floor<std::chrono::seconds>(
        std::chrono::file_clock::to_sys(mtime));
  }
  return parse_dump(text::read_file(path), provenance);
}

std::string serialize_dump(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records()) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

void export_dump(const Corpus& corpus, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_dump(corpus));
}

Corpus merge(const std::vector<Corpus>& parts) {
  std::vector<IssueRecord> all;
  CorpusProvenance provenance;
  for (const auto& p : parts) {
    all.insert(all.end(), p.records().begin(), p.records().end());
    provenance.source = p.provenance().source;
    provenance.fetched_at = std::max(provenance.fetched_at, p.provenance().fetched_at);
  }
  return Corpus(std::move(all), provenance);
}

void GoldSet::add(GoldLabel label) {
  const auto key = label.key.to_string();
  if (!label.fault_related && !label.symptom_leaf && !label.root_cause) {
    throw Error(ErrorCode::kMalformedRecord, "gold label for " + key + " has no populated field", key);
  }
  if (!index_.emplace(label.key, labels_.size()).second) {
    throw Error(ErrorCode::kDuplicateKey, "duplicate gold label for " + key, key);
  }
  labels_.push_back(std::move(label));
}

const GoldLabel* GoldSet::find(const IssueKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &labels_[it->second];
}

namespace {

std::vector<std::string> split_csv_row(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::optional<bool> parse_flag(std::string_view cell, const std::string& where) {
  auto v = text::lower(text::trim(cell));
  if (v.empty()) return std::nullopt;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::kMalformedRecord, where + ": fault_related must be true/false, got '" + v + "'", where);
}

std::optional<std::string> parse_id(std::string_view cell) {
  auto v = text::trim(cell);
  if (v.empty()) return std::nullopt;
  return std::string(v);
}

}  // namespace

GoldSet parse_gold_csv(std::string_view contents) {
  auto lines = text::split_lines(contents);
  std::size_t header_idx = 0;
  while (header_idx < lines.size() && text::trim(lines[header_idx]).empty()) ++header_idx;
  if (header_idx == lines.size()) throw Error(ErrorCode::kMalformedDocument, "gold file has no header row");

  auto header = split_csv_row(lines[header_idx]);
  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == name) return i;
    }
    throw Error(ErrorCode::kMalformedDocument, "gold file is missing column '" + std::string(name) + "'",
                std::string(name));
  };
  const auto c_repo = column("repo"), c_number = column("number"), c_fault = column("fault_related"),
             c_symptom = column("symptom_leaf_id"), c_root = column("root_cause_id");

  GoldSet gold;
  for (std::size_t i = header_idx + 1; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const auto where = "gold line " + std::to_string(i + 1);
    auto cells = split_csv_row(lines[i]);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRecord, where + ": expected " + std::to_string(header.size()) + " cells",
                  where);
    }
    GoldLabel label;
    label.key.repo = std::string(text::trim(cells[c_repo]));
    auto num = text::trim(cells[c_number]);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), label.key.number);
    if (ec != std::errc{} || ptr != num.data() + num.size() || label.key.number <= 0 || label.key.repo.empty()) {
      throw Error(ErrorCode::kMalformedRecord, where + ": bad repo/number", where);
    }
    label.fault_related = parse_flag(cells[c_fault], where);
    label.symptom_leaf = parse_id(cells[c_symptom]);
    label.root_cause = parse_id(cells[c_root]);
    gold.add(std::move(label));
  }
  return gold;
}

GoldSet load_gold_file(const std::filesystem::path& path) { return parse_gold_csv(text::read_file(path)); }

std::string serialize_gold_csv(const GoldSet& gold) {
  std::string out = "repo,number,fault_related,symptom_leaf_id,root_cause_id\n";
  for (const auto& g : gold.labels()) {
    out += g.key.repo + "," + std::to_string(g.key.number) + ",";
    if (g.fault_related) out += *g.fault_related ? "true" : "false";
    out += "," + g.symptom_leaf.value_or("") + "," + g.root_cause.value_or("") + "\n";
  }
  return out;
}

void validate_gold(const GoldSet& gold, const Taxonomy* symptoms, const Taxonomy* root_causes) {
  for (const auto& g : gold.labels()) {
    if (g.symptom_leaf && symptoms != nullptr && symptoms->find(*g.symptom_leaf) == nullptr) {
      throw Error(ErrorCode::kUnresolvableGold,
                  "gold symptom '" + *g.symptom_leaf + "' for " + g.key.to_string() + " is not in the taxonomy",
                  *g.symptom_leaf);
    }
    if (g.root_cause && root_causes != nullptr && root_causes->find(*g.root_cause) == nullptr) {
      throw Error(ErrorCode::kUnresolvableGold,
                  "gold root cause '" + *g.root_cause + "' for " + g.key.to_string() + " is not in the taxonomy",
                  *g.root_cause);
    }
  }
}

}  // namespace faultloom
