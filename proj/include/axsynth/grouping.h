#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axsynth/describe.h"
#include "axsynth/geometry.h"
#include "axsynth/ingest.h"
#include "axsynth/raster.h"

namespace axsynth {

// Knobs of the rule-based grouping heuristics. Pixel quantities are in
// screenshot pixels; *_frac values are fractions of the screen extent or
// area.
struct GroupingConfig {
  // Text grouping: consecutive lines merge when their vertical spacing is
  // below min(height) + pad.
  double text_vertical_pad = 15;
  // Image/button to caption association.
  double caption_x_overlap_min = 0.25;
  double caption_vgap_frac = 0.02;
  double caption_y_overlap_min = 0.40;
  double caption_hgap_frac = 0.02;
  // Column and row formation.
  double column_gap_factor = 1.25;
  double column_edge_tol = 40;
  double row_gap_factor = 1.25;
  double row_edge_tol = 40;
  // Colour regions.
  int color_top_k = 3;
  int color_quant_bits = 4;
  int opening_kernel = 5;
  double min_region_frac = 0.005;
  double max_region_frac = 0.95;
  // A colour region is kept by heuristic_groups only when at least two
  // inputs lie inside it at this containment ratio.
  double containment_threshold = 0.9;

  // Throws ValidationError when a field is out of range.
  void validate() const;

  friend bool operator==(const GroupingConfig&,
                         const GroupingConfig&) = default;
};

enum class ClusterKind { kText, kCaption, kColumn, kRow, kColor };

std::string_view to_string(ClusterKind kind);
GroupSource to_group_source(ClusterKind kind);

struct TextBox {
  BBox bbox;
  std::string text;
};

// Members refer to indices of the inputs of the rule that produced the
// cluster. `bbox` is the exact union of the member boxes.
struct Cluster {
  std::vector<std::size_t> elements;
  std::vector<std::size_t> texts;
  BBox bbox;
  ClusterKind kind = ClusterKind::kText;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

// Consecutive lines in (y, x) order merge when their x-intervals overlap and
// their vertical spacing is strictly below min(h1, h2) + text_vertical_pad.
// Merging is transitive.
std::vector<Cluster> group_text(std::span<const TextBox> texts,
                                const GroupingConfig& cfg);

// Pairs an image or button with a nearby text label. Only elements whose
// class is AXImage or AXButton take part. A pair qualifies on
//   x-overlap / min(widths) >= caption_x_overlap_min and
//   vertical gap < caption_vgap_frac * screen.height, or
//   y-overlap / min(heights) >= caption_y_overlap_min and
//   horizontal gap < caption_hgap_frac * screen.width.
// Each text joins only its nearest qualifying element (center distance).
std::vector<Cluster> associate_captions(
    std::span<const DescribedElement> elements, std::span<const TextBox> texts,
    ScreenSize screen, const GroupingConfig& cfg);

enum class LineAxis { kColumn, kRow };

// Column: vertical gap < column_gap_factor * min(heights) and left or right
// edges within column_edge_tol. Row: the transposed rule over horizontal
// gaps, widths and top/bottom edges. Pairs are chained transitively.
std::vector<Cluster> form_lines(std::span<const BBox> boxes, LineAxis axis,
                                const GroupingConfig& cfg);

// Candidate groups from large flat-coloured areas of the screenshot.
std::vector<GroupBox> color_regions(const Raster& image,
                                    const GroupingConfig& cfg);

// Runs text grouping, caption association, column and row formation and,
// when an image is given, colour regions, in that order.
std::vector<GroupBox> heuristic_groups(
    std::span<const DescribedElement> elements, std::span<const TextBox> texts,
    const Raster* image, ScreenSize screen, const GroupingConfig& cfg);

}  // namespace axsynth
