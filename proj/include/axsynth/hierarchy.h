#pragma once

#include <span>
#include <vector>

#include "axsynth/describe.h"
#include "axsynth/geometry.h"
#include "axsynth/ingest.h"
#include "axsynth/tree.h"

namespace axsynth {

struct AssemblyConfig {
  double merge_iou = 0.8;
  double containment_threshold = 0.9;
  bool drop_empty_groups = true;

  void validate() const;

  friend bool operator==(const AssemblyConfig&,
                         const AssemblyConfig&) = default;
};

// Greedy merge in descending confidence: a box overlapping an already kept
// box at IoU >= merge_iou is folded into it (union box, max confidence).
// Result is sorted by area, largest first.
std::vector<GroupBox> dedupe_groups(std::span<const GroupBox> groups,
                                    const AssemblyConfig& cfg);

// Builds the tree for one window. The root is an AXWindow covering
// (0, 0, w, h). Each group hangs under the best qualifying container
// (containment >= threshold; highest containment, then smallest area, then
// smallest origin), each element becomes a leaf under the best qualifying
// group, and everything else attaches to the root. Children are sorted in
// reading order. The result does not depend on input order. Throws
// ValidationError for a degenerate window.
AXNode assemble(ScreenSize window, std::span<const DescribedElement> elements,
                std::span<const GroupBox> groups, const AssemblyConfig& cfg);

}  // namespace axsynth
