#include "axsynth/overlay.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace axsynth {
namespace {

void collect(const AXNode& n, bool is_root, std::vector<BBox>& leaves,
             std::vector<BBox>& groups) {
  if (!is_root) (n.is_leaf() ? leaves : groups).push_back(n.bbox);
  for (const AXNode& c : n.children) collect(c, false, leaves, groups);
}

}  // namespace

std::optional<OverlayStyle> overlay_style_from_string(std::string_view s) {
  if (s == "elements") return OverlayStyle::kElements;
  if (s == "groups") return OverlayStyle::kGroups;
  if (s == "both") return OverlayStyle::kBoth;
  return std::nullopt;
}

void draw_rect(Raster& raster, const BBox& box, Rgb color, int thickness) {
  const int x0 = static_cast<int>(std::lround(box.x));
  const int y0 = static_cast<int>(std::lround(box.y));
  const int x1 = static_cast<int>(std::lround(box.right())) - 1;
  const int y1 = static_cast<int>(std::lround(box.bottom())) - 1;
  if (x1 < x0 || y1 < y0) return;
  const int t = std::max(1, thickness);
  auto fill = [&](int ax, int ay, int bx, int by) {
    ax = std::max(ax, 0);
    ay = std::max(ay, 0);
    bx = std::min(bx, raster.width() - 1);
    by = std::min(by, raster.height() - 1);
    for (int y = ay; y <= by; ++y) {
      for (int x = ax; x <= bx; ++x) raster.set(x, y, color);
    }
  };
  fill(x0, y0, x1, std::min(y1, y0 + t - 1));
  fill(x0, std::max(y0, y1 - t + 1), x1, y1);
  fill(x0, y0, std::min(x1, x0 + t - 1), y1);
  fill(std::max(x0, x1 - t + 1), y0, x1, y1);
}

Raster render_overlay(const Raster& image, std::span<const BBox> elements,
                      std::span<const BBox> groups, OverlayStyle style) {
  Raster out = image;
  if (style != OverlayStyle::kElements) {
    for (const BBox& b : groups) draw_rect(out, b, kGroupColor, kOverlayThickness);
  }
  if (style != OverlayStyle::kGroups) {
    for (const BBox& b : elements) draw_rect(out, b, kLeafColor, kOverlayThickness);
  }
  return out;
}

Raster render_overlay(const Raster& image, const AXNode& tree, OverlayStyle style) {
  std::vector<BBox> leaves, groups;
  collect(tree, true, leaves, groups);
  return render_overlay(image, leaves, groups, style);
}

}  // namespace axsynth
