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
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace faultloom {

enum class TaxonomyKind { kSymptom, kRootCause };

std::string_view to_string(TaxonomyKind kind);
TaxonomyKind taxonomy_kind_from_string(std::string_view text);

inline constexpr int kMaxTaxonomyLevel = 3;

struct TaxonomyNode {
  std::string id;
  std::string name;
  std::string definition;
  int level = 1;
  std::vector<TaxonomyNode> children;
};

// An immutable, validated category tree. Copies share the same node storage,
// so node addresses (and therefore membership checks) survive copying.
class Taxonomy {
 public:
  TaxonomyKind kind() const;
  const std::string& source() const;
  const std::vector<TaxonomyNode>& roots() const;

  // Deepest level at which labels are assigned and scored: 3 for symptoms,
  // 2 for root causes unless the document overrides it.
  int leaf_level() const;

  const TaxonomyNode* find(std::string_view id) const;
  // Throws Error(kNotInTaxonomy) for unknown ids.
  const TaxonomyNode& node(std::string_view id) const;
  const TaxonomyNode* parent_of(const TaxonomyNode& node) const;
  bool contains(const TaxonomyNode& node) const;

  // All nodes, pre-order (document order).
  const std::vector<const TaxonomyNode*>& nodes() const;
  std::size_t count_at_level(int level) const;

  // A node is assignable at granularity g when it sits at level g, or when it
  // is childless above g (e.g. a root such as "Unknown" with no subcategories).
  bool is_granular(const TaxonomyNode& node, int granularity) const;
  bool is_leaf_granular(const TaxonomyNode& node) const { return is_granular(node, leaf_level()); }
  std::vector<const TaxonomyNode*> granular_nodes(int granularity) const;
  std::vector<const TaxonomyNode*> leaves() const { return granular_nodes(leaf_level()); }

 private:
  struct Data;
  explicit Taxonomy(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;

  friend Taxonomy load_taxonomy(const nlohmann::json& document);
};

// Validates and loads a taxonomy document:
//   {"kind": "symptom"|"root_cause", "source": "...", "leaf_level": 3?,
//    "roots": [{"id", "name", "definition", "level"?, "children": [...]}]}
// Node order is preserved. Violations throw Error with the offending id as subject.
Taxonomy load_taxonomy(const nlohmann::json& document);
Taxonomy load_taxonomy_file(const std::filesystem::path& path);

// Case-insensitive, whitespace-normalized exact-name lookup.
const TaxonomyNode& resolve_label(const Taxonomy& taxonomy, std::string_view label);

// Path from the level-1 root down to `node` (inclusive).
std::vector<const TaxonomyNode*> ancestors(const Taxonomy& taxonomy, const TaxonomyNode& node);

// The node on `node`'s path at `level`, or the deepest one when the path is
// shorter than `level`.
const TaxonomyNode& ancestor_at(const Taxonomy& taxonomy, const TaxonomyNode& node, int level);

// Depth-indented outline of every node's name and definition, one per line.
std::string render_prompt_section(const Taxonomy& taxonomy);

}  // namespace faultloom
