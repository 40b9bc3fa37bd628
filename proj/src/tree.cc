#include "axsynth/tree.h"

#include <algorithm>

#include "axsynth/errors.h"
#include "json_util.h"

namespace axsynth {
namespace {

using detail::Json;

AXNode node_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected object");
  AXNode node;
  node.name = detail::optional_string(j, "name", where);
  const std::string role = detail::required_string(j, "role", where);
  auto parsed = role_from_string(role);
  if (!parsed) throw ParseError(where + ": unknown role \"" + role + "\"");
  node.role = *parsed;
  node.description = detail::optional_string(j, "description", where);
  node.role_description = detail::optional_string(j, "role_description", where);
  node.value = detail::optional_string(j, "value", where);
  node.bbox = detail::bbox_from_json(detail::required(j, "bbox", where),
                                     where + ".bbox");
  if (auto it = j.find("visible_bbox"); it != j.end() && !it->is_null()) {
    node.visible_bbox = detail::bbox_from_json(*it, where + ".visible_bbox");
  }
  if (auto it = j.find("children"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(where + ".children: expected array");
    node.children.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      node.children.push_back(node_from_json(
          (*it)[i], where + ".children[" + std::to_string(i) + "]"));
    }
  }
  return node;
}

Json optional_to_json(const std::optional<std::string>& s) {
  return s ? Json(*s) : Json(nullptr);
}

Json node_to_json(const AXNode& node) {
  Json j = Json::object();
  j["name"] = optional_to_json(node.name);
  j["role"] = std::string(to_string(node.role));
  j["description"] = optional_to_json(node.description);
  j["role_description"] = optional_to_json(node.role_description);
  j["value"] = optional_to_json(node.value);
  Json children = Json::array();
  for (const AXNode& c : node.children) children.push_back(node_to_json(c));
  j["children"] = std::move(children);
  j["bbox"] = detail::bbox_to_json(node.bbox);
  j["visible_bbox"] =
      node.visible_bbox ? detail::bbox_to_json(*node.visible_bbox) : Json();
  return j;
}

void flatten_into(const AXNode& node, int depth, std::vector<std::size_t>& path,
                  std::vector<FlatEntry>& out) {
  out.push_back({&node, depth, path});
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(i);
    flatten_into(node.children[i], depth + 1, path, out);
    path.pop_back();
  }
}

}  // namespace

AXNode parse_tree(std::string_view json_text) {
  return node_from_json(detail::parse_json(std::string(json_text)), "$");
}

std::string serialize_tree(const AXNode& tree) {
  return node_to_json(tree).dump();
}

std::vector<FlatEntry> flatten(const AXNode& tree) {
  std::vector<FlatEntry> out;
  std::vector<std::size_t> path;
  flatten_into(tree, 1, path, out);
  return out;
}

TreeStats tree_stats(const AXNode& tree) {
  TreeStats stats;
  for (const FlatEntry& e : flatten(tree)) {
    ++stats.node_count;
    stats.max_depth = std::max<std::size_t>(stats.max_depth, e.depth);
    if (e.node->is_leaf()) {
      ++stats.element_count;
    } else if (e.depth > 1) {
      ++stats.group_count;
    }
  }
  return stats;
}

}  // namespace axsynth
