#include "axsynth/hierarchy.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <tuple>

#include "axsynth/errors.h"

namespace axsynth {
namespace {

// Strict total order on distinct boxes: larger area first, then reading
// order. A group may only nest inside a group that precedes it.
bool larger_box(const BBox& a, const BBox& b) {
  if (a.area() != b.area()) return a.area() > b.area();
  return reading_order_less(a, b);
}

// True when candidate `a` is a better container than `b` for the same child.
bool better_container(double ca, const BBox& a, double cb, const BBox& b) {
  if (ca != cb) return ca > cb;
  if (a.area() != b.area()) return a.area() < b.area();
  return reading_order_less(a, b);
}

std::optional<std::size_t> best_container(const BBox& child,
                                          std::span<const GroupBox> groups,
                                          double threshold,
                                          std::optional<std::size_t> self) {
  std::optional<std::size_t> best;
  double best_ratio = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (self) {
      if (g == *self || !larger_box(groups[g].bbox, groups[*self].bbox)) continue;
    }
    const double ratio = containment(child, groups[g].bbox);
    if (ratio < threshold) continue;
    if (!best || better_container(ratio, groups[g].bbox, best_ratio,
                                  groups[*best].bbox)) {
      best = g;
      best_ratio = ratio;
    }
  }
  return best;
}

auto element_key_tuple(const DescribedElement& e) {
  const BBox& b = e.detection.bbox;
  return std::make_tuple(b.y, b.x, b.w, b.h, e.detection.cls,
                         e.detection.confidence, e.description, e.source);
}

auto child_key(const AXNode& n) {
  return std::make_tuple(n.bbox.y, n.bbox.x, n.bbox.w, n.bbox.h, n.is_leaf(),
                         n.role, n.description, n.value);
}

void sort_children(AXNode& node) {
  std::stable_sort(node.children.begin(), node.children.end(),
                   [](const AXNode& a, const AXNode& b) {
                     return child_key(a) < child_key(b);
                   });
  for (AXNode& c : node.children) sort_children(c);
}

std::optional<BBox> clip_to_window(const BBox& b, ScreenSize window) {
  const double x0 = std::max(b.x, 0.0), y0 = std::max(b.y, 0.0);
  const double x1 = std::min(b.right(), window.width);
  const double y1 = std::min(b.bottom(), window.height);
  if (x1 < x0 || y1 < y0) return std::nullopt;
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

AXNode make_leaf(const DescribedElement& e, ScreenSize window) {
  AXNode leaf;
  leaf.role = to_role(e.detection.cls);
  leaf.role_description = role_description(e.detection.cls);
  if (e.detection.cls == SimplifiedRole::kStaticText) {
    leaf.value = e.description;
  } else {
    leaf.description = e.description;
  }
  leaf.bbox = e.detection.bbox;
  leaf.visible_bbox = clip_to_window(e.detection.bbox, window);
  return leaf;
}

}  // namespace

void AssemblyConfig::validate() const {
  if (!(merge_iou > 0.0 && merge_iou <= 1.0)) {
    throw ValidationError("assembly config: merge_iou must lie in (0,1]");
  }
  if (!(containment_threshold > 0.0 && containment_threshold <= 1.0)) {
    throw ValidationError(
        "assembly config: containment_threshold must lie in (0,1]");
  }
}

std::vector<GroupBox> dedupe_groups(std::span<const GroupBox> groups,
                                    const AssemblyConfig& cfg) {
  cfg.validate();
  std::vector<GroupBox> order(groups.begin(), groups.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const GroupBox& a, const GroupBox& b) {
                     if (a.confidence != b.confidence) {
                       return a.confidence > b.confidence;
                     }
                     if (a.bbox != b.bbox) return reading_order_less(a.bbox, b.bbox);
                     return a.source < b.source;
                   });
  std::vector<GroupBox> kept;
  for (const GroupBox& g : order) {
    std::optional<std::size_t> target;
    double target_iou = 0;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const double v = iou(g.bbox, kept[k].bbox);
      if (v >= cfg.merge_iou && (!target || v > target_iou)) {
        target = k;
        target_iou = v;
      }
    }
    if (target) {
      GroupBox& into = kept[*target];
      into.bbox = union_box(into.bbox, g.bbox);
      into.confidence = std::max(into.confidence, g.confidence);
    } else {
      kept.push_back(g);
    }
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const GroupBox& a, const GroupBox& b) {
                     return larger_box(a.bbox, b.bbox);
                   });
  return kept;
}

AXNode assemble(ScreenSize window, std::span<const DescribedElement> elements,
                std::span<const GroupBox> groups, const AssemblyConfig& cfg) {
  cfg.validate();
  if (!(window.width > 0 && window.height > 0)) {
    throw ValidationError("degenerate window size");
  }
  std::vector<GroupBox> merged = dedupe_groups(groups, cfg);
  // Union growth during the merge can leave two boxes identical again.
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [](const GroupBox& a, const GroupBox& b) {
                             return a.bbox == b.bbox;
                           }),
               merged.end());
  const double threshold = cfg.containment_threshold;

  std::vector<std::optional<std::size_t>> group_parent(merged.size());
  for (std::size_t g = 0; g < merged.size(); ++g) {
    group_parent[g] = best_container(merged[g].bbox, merged, threshold, g);
  }

  std::vector<DescribedElement> sorted(elements.begin(), elements.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const DescribedElement& a, const DescribedElement& b) {
                     return element_key_tuple(a) < element_key_tuple(b);
                   });

  std::vector<std::vector<std::size_t>> group_children(merged.size());
  std::vector<std::size_t> root_groups;
  for (std::size_t g = 0; g < merged.size(); ++g) {
    (group_parent[g] ? group_children[*group_parent[g]] : root_groups)
        .push_back(g);
  }
  std::vector<std::vector<AXNode>> group_leaves(merged.size());
  std::vector<AXNode> root_leaves;
  for (const DescribedElement& e : sorted) {
    auto g = best_container(e.detection.bbox, merged, threshold, std::nullopt);
    (g ? group_leaves[*g] : root_leaves).push_back(make_leaf(e, window));
  }

  // Parents precede children in `merged` (area order), so build bottom-up.
  std::vector<std::optional<AXNode>> built(merged.size());
  std::vector<bool> has_leaf(merged.size(), false);
  for (std::size_t g = merged.size(); g-- > 0;) {
    AXNode node;
    node.role = Role::kGroup;
    node.role_description = "group";
    node.bbox = merged[g].bbox;
    node.visible_bbox = clip_to_window(merged[g].bbox, window);
    has_leaf[g] = !group_leaves[g].empty();
    for (std::size_t c : group_children[g]) {
      if (!built[c]) continue;
      has_leaf[g] = has_leaf[g] || has_leaf[c];
      node.children.push_back(std::move(*built[c]));
    }
    for (AXNode& leaf : group_leaves[g]) node.children.push_back(std::move(leaf));
    if (cfg.drop_empty_groups && !has_leaf[g]) continue;
    built[g] = std::move(node);
  }

  AXNode root;
  root.role = Role::kWindow;
  root.role_description = "standard window";
  root.bbox = {0, 0, window.width, window.height};
  root.visible_bbox = root.bbox;
  for (std::size_t g : root_groups) {
    if (built[g]) root.children.push_back(std::move(*built[g]));
  }
  for (AXNode& leaf : root_leaves) root.children.push_back(std::move(leaf));
  sort_children(root);
  return root;
}

}  // namespace axsynth
