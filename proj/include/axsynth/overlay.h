#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "axsynth/geometry.h"
#include "axsynth/raster.h"
#include "axsynth/tree.h"

namespace axsynth {

enum class OverlayStyle { kElements, kGroups, kBoth };

std::optional<OverlayStyle> overlay_style_from_string(std::string_view s);

inline constexpr Rgb kLeafColor{170, 40, 220};
inline constexpr Rgb kGroupColor{250, 190, 0};
inline constexpr int kOverlayThickness = 2;

// Outlines leaves and/or non-root internal nodes on a copy of `image`.
// Groups are drawn first so leaf outlines stay on top.
Raster render_overlay(const Raster& image, const AXNode& tree, OverlayStyle style);

Raster render_overlay(const Raster& image, std::span<const BBox> elements,
                      std::span<const BBox> groups, OverlayStyle style);

// Rectangle outline clipped to the raster.
void draw_rect(Raster& raster, const BBox& box, Rgb color, int thickness);

}  // namespace axsynth
