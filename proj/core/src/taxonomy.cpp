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

#include "faultloom/taxonomy.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"
#include "faultloom/text.hpp"

namespace faultloom {

using nlohmann::json;

struct Taxonomy::Data {
  TaxonomyKind kind = TaxonomyKind::kSymptom;
  std::string source;
  int leaf_level = 3;
  std::vector<TaxonomyNode> roots;

  std::vector<const TaxonomyNode*> preorder;
  std::unordered_map<std::string, std::size_t> index_by_id;  // into preorder
  std::unordered_map<const TaxonomyNode*, const TaxonomyNode*> parent;

  void build_index() {
    auto visit = [&](auto&& self, const TaxonomyNode& n, const TaxonomyNode* up) -> void {
      index_by_id.emplace(n.id, preorder.size());
      preorder.push_back(&n);
      parent.emplace(&n, up);
      for (const auto& c : n.children) self(self, c, &n);
    };
    for (const auto& r : roots) visit(visit, r, nullptr);
  }
};

std::string_view to_string(TaxonomyKind kind) {
  return kind == TaxonomyKind::kSymptom ? "symptom" : "root_cause";
}

TaxonomyKind taxonomy_kind_from_string(std::string_view text) {
  if (text == "symptom") return TaxonomyKind::kSymptom;
  if (text == "root_cause") return TaxonomyKind::kRootCause;
  throw Error(ErrorCode::kMalformedDocument, "unknown taxonomy kind '" + std::string(text) + "'",
              std::string(text));
}

Taxonomy::Taxonomy(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

TaxonomyKind Taxonomy::kind() const { return data_->kind; }
const std::string& Taxonomy::source() const { return data_->source; }
const std::vector<TaxonomyNode>& Taxonomy::roots() const { return data_->roots; }
int Taxonomy::leaf_level() const { return data_->leaf_level; }
const std::vector<const TaxonomyNode*>& Taxonomy::nodes() const { return data_->preorder; }

const TaxonomyNode* Taxonomy::find(std::string_view id) const {
  auto it = data_->index_by_id.find(std::string(id));
  return it == data_->index_by_id.end() ? nullptr : data_->preorder[it->second];
}

const TaxonomyNode& Taxonomy::node(std::string_view id) const {
  if (const auto* n = find(id)) return *n;
  throw Error(ErrorCode::kNotInTaxonomy, "no node with id '" + std::string(id) + "' in " +
                                             std::string(to_string(kind())) + " taxonomy",
              std::string(id));
}

bool Taxonomy::contains(const TaxonomyNode& node) const { return data_->parent.count(&node) != 0; }

const TaxonomyNode* Taxonomy::parent_of(const TaxonomyNode& node) const {
  auto it = data_->parent.find(&node);
  if (it == data_->parent.end()) {
    throw Error(ErrorCode::kNotInTaxonomy, "node '" + node.id + "' does not belong to this taxonomy", node.id);
  }
  return it->second;
}

std::size_t Taxonomy::count_at_level(int level) const {
  return static_cast<std::size_t>(std::count_if(data_->preorder.begin(), data_->preorder.end(),
                                                [&](const TaxonomyNode* n) { return n->level == level; }));
}

bool Taxonomy::is_granular(const TaxonomyNode& node, int granularity) const {
  return node.level == granularity || (node.level < granularity && node.children.empty());
}

std::vector<const TaxonomyNode*> Taxonomy::granular_nodes(int granularity) const {
  std::vector<const TaxonomyNode*> out;
  for (const auto* n : data_->preorder) {
    if (is_granular(*n, granularity)) out.push_back(n);
  }
  return out;
}

namespace {

const json& require_field(const json& obj, const char* field, const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw Error(ErrorCode::kMalformedDocument, where + ": missing field '" + field + "'", where);
  }
  return *it;
}

std::string require_string(const json& obj, const char* field, const std::string& where) {
  const auto& v = require_field(obj, field, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::kMalformedDocument, where + ": field '" + field + "' must be a string", where);
  }
  return v.get<std::string>();
}

struct NodeParser {
  std::set<std::string> seen_ids;
  std::vector<std::string> path_ids;

  TaxonomyNode parse(const json& doc, int depth) {
    std::string where = path_ids.empty() ? "root" : "child of '" + path_ids.back() + "'";
    if (!doc.is_object()) throw Error(ErrorCode::kMalformedDocument, where + ": node must be an object", where);

    TaxonomyNode node;
    node.id = require_string(doc, "id", where);
    if (text::trim(node.id).empty()) {
      throw Error(ErrorCode::kMalformedDocument, where + ": node id must be non-empty", where);
    }
    if (std::find(path_ids.begin(), path_ids.end(), node.id) != path_ids.end()) {
      throw Error(ErrorCode::kCycle, "node '" + node.id + "' appears among its own ancestors", node.id);
    }
    if (!seen_ids.insert(node.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate node id '" + node.id + "'", node.id);
    }

    node.name = require_string(doc, "name", node.id);
    if (text::trim(node.name).empty()) {
      throw Error(ErrorCode::kMalformedDocument, "node '" + node.id + "' has an empty name", node.id);
    }
    auto def = doc.find("definition");
    if (def == doc.end() || !def->is_string() || text::trim(def->get<std::string>()).empty()) {
      throw Error(ErrorCode::kMissingDefinition, "node '" + node.id + "' has no definition", node.id);
    }
    node.definition = def->get<std::string>();

    if (depth > kMaxTaxonomyLevel) {
      throw Error(ErrorCode::kLevelViolation,
                  "node '" + node.id + "' sits at level " + std::to_string(depth) + ", deeper than 3", node.id);
    }
    if (auto lvl = doc.find("level"); lvl != doc.end()) {
      if (!lvl->is_number_integer() || lvl->get<int>() != depth) {
        throw Error(ErrorCode::kLevelViolation,
                    "node '" + node.id + "' declares level " + lvl->dump() + " but sits at level " +
                        std::to_string(depth),
                    node.id);
      }
    }
    node.level = depth;

    if (auto kids = doc.find("children"); kids != doc.end() && !kids->is_null()) {
      if (!kids->is_array()) {
        throw Error(ErrorCode::kMalformedDocument, "node '" + node.id + "': children must be a list", node.id);
      }
      path_ids.push_back(node.id);
      std::set<std::string> sibling_names;
      for (const auto& child_doc : *kids) {
        auto child = parse(child_doc, depth + 1);
        if (!sibling_names.insert(text::normalize_label(child.name)).second) {
          throw Error(ErrorCode::kDuplicateName,
                      "sibling name '" + child.name + "' repeated under '" + node.id + "'", child.id);
        }
        node.children.push_back(std::move(child));
      }
      path_ids.pop_back();
    }
    return node;
  }
};

}  // namespace

Taxonomy load_taxonomy(const json& document) {
  if (!document.is_object()) {
    throw Error(ErrorCode::kMalformedDocument, "taxonomy document must be an object");
  }
  auto data = std::make_shared<Taxonomy::Data>();
  data->kind = taxonomy_kind_from_string(require_string(document, "kind", "taxonomy"));
  data->source = require_string(document, "source", "taxonomy");
  data->leaf_level = data->kind == TaxonomyKind::kSymptom ? 3 : 2;
  if (auto ll = document.find("leaf_level"); ll != document.end()) {
    if (!ll->is_number_integer() || ll->get<int>() < 1 || ll->get<int>() > kMaxTaxonomyLevel) {
      throw Error(ErrorCode::kLevelViolation, "leaf_level must be an integer in 1..3", "leaf_level");
    }
    data->leaf_level = ll->get<int>();
  }

  const auto& roots = require_field(document, "roots", "taxonomy");
  if (!roots.is_array() || roots.empty()) {
    throw Error(ErrorCode::kMalformedDocument, "taxonomy must have a non-empty 'roots' list");
  }
  NodeParser parser;
  std::set<std::string> root_names;
  for (const auto& r : roots) {
    auto node = parser.parse(r, 1);
    if (!root_names.insert(text::normalize_label(node.name)).second) {
      throw Error(ErrorCode::kDuplicateName, "root name '" + node.name + "' repeated", node.id);
    }
    data->roots.push_back(std::move(node));
  }
  // Nothing may sit below the leaf level, or its ancestors could never be assigned.
  std::function<void(const TaxonomyNode&)> check_depth = [&](const TaxonomyNode& n) {
    if (n.level > data->leaf_level) {
      throw Error(ErrorCode::kLevelViolation,
                  "node '" + n.id + "' at level " + std::to_string(n.level) + " is below leaf level " +
                      std::to_string(data->leaf_level),
                  n.id);
    }
    for (const auto& c : n.children) check_depth(c);
  };
  for (const auto& r : data->roots) check_depth(r);
  data->build_index();
  return Taxonomy(std::move(data));
}

Taxonomy load_taxonomy_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(text::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, path.string() + ": " + e.what(), path.string());
  }
  return load_taxonomy(doc);
}

const TaxonomyNode& resolve_label(const Taxonomy& taxonomy, std::string_view label) {
  const auto wanted = text::normalize_label(label);
  const TaxonomyNode* match = nullptr;
  for (const auto* n : taxonomy.nodes()) {
    if (text::normalize_label(n->name) != wanted) continue;
    if (match != nullptr) {
      throw Error(ErrorCode::kAmbiguousMatch,
                  "label '" + std::string(label) + "' matches both '" + match->id + "' and '" + n->id + "'",
                  std::string(label));
    }
    match = n;
  }
  if (match == nullptr) {
    throw Error(ErrorCode::kNoMatch,
                "label '" + std::string(label) + "' is not a " + std::string(to_string(taxonomy.kind())) +
                    " category",
                std::string(label));
  }
  return *match;
}

std::vector<const TaxonomyNode*> ancestors(const Taxonomy& taxonomy, const TaxonomyNode& node) {
  std::vector<const TaxonomyNode*> path;
  for (const TaxonomyNode* cur = &node; cur != nullptr; cur = taxonomy.parent_of(*cur)) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

const TaxonomyNode& ancestor_at(const Taxonomy& taxonomy, const TaxonomyNode& node, int level) {
  if (level < 1) throw Error(ErrorCode::kInvalidArgument, "level must be >= 1");
  auto path = ancestors(taxonomy, node);
  auto idx = std::min<std::size_t>(static_cast<std::size_t>(level), path.size()) - 1;
  return *path[idx];
}

std::string render_prompt_section(const Taxonomy& taxonomy) {
  std::string out;
  for (const auto* n : taxonomy.nodes()) {
    out.append(static_cast<std::size_t>(2 * (n->level - 1)), ' ');
    out += "- ";
    out += n->name;
    out += ": ";
    out += text::collapse_whitespace(n->definition);
    out += '\n';
  }
  return out;
}

}  // namespace faultloom
