#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "axsynth/geometry.h"
#include "axsynth/role.h"

namespace axsynth {

// One accessibility tree node. Children are owned by value, so a tree is
// acyclic by construction.
struct AXNode {
  std::optional<std::string> name;
  Role role = Role::kGroup;
  std::optional<std::string> description;
  std::optional<std::string> role_description;
  std::optional<std::string> value;
  std::vector<AXNode> children;
  BBox bbox;
  std::optional<BBox> visible_bbox;

  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const AXNode&, const AXNode&) = default;
};

// Parses the canonical tree JSON. Throws ParseError on malformed JSON, an
// unknown role string or a bbox array of the wrong arity. JSON nulls map to
// absent optional fields.
AXNode parse_tree(std::string_view json_text);

// Canonical one-line JSON: fixed key order (name, role, description,
// role_description, value, children, bbox, visible_bbox), integral
// coordinates printed without a decimal point.
std::string serialize_tree(const AXNode& tree);

struct FlatEntry {
  const AXNode* node = nullptr;
  int depth = 1;  // root = 1
  std::vector<std::size_t> path;
};

// Depth-first preorder. The returned pointers borrow from `tree`.
std::vector<FlatEntry> flatten(const AXNode& tree);

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t element_count = 0;  // leaves
  std::size_t max_depth = 0;
  std::size_t group_count = 0;  // internal, non-root

  friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

TreeStats tree_stats(const AXNode& tree);

}  // namespace axsynth
