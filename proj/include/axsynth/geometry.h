#pragma once

#include <algorithm>
#include <compare>
#include <tuple>

namespace axsynth {

// Axis-aligned rectangle in pixel screen coordinates. Origin top-left,
// y grows downward.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  double center_x() const { return x + w / 2; }
  double center_y() const { return y + h / 2; }

  // Finite coordinates and non-negative extent.
  bool valid() const;

  // Point test with the boundary counted as inside.
  bool contains_point(double px, double py) const {
    return px >= x && px <= right() && py >= y && py <= bottom();
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Pixel dimensions of a screenshot or window.
struct ScreenSize {
  double width = 0;
  double height = 0;

  friend bool operator==(const ScreenSize&, const ScreenSize&) = default;
};

// Strict weak order by (y, x, w, h). Used wherever a canonical order of
// boxes is needed.
inline bool reading_order_less(const BBox& a, const BBox& b) {
  return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
}

double intersection_area(const BBox& a, const BBox& b);

// Smallest box covering both inputs.
BBox union_box(const BBox& a, const BBox& b);

// Intersection over union; 0 when the union is empty.
double iou(const BBox& a, const BBox& b);

// Fraction of `inner` covered by `outer`. A zero-area inner box counts as
// fully contained when its origin lies inside `outer`.
double containment(const BBox& inner, const BBox& outer);

// Length of the overlap of [a0,a1] and [b0,b1]; negative when disjoint.
inline double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::min(a1, b1) - std::max(a0, b0);
}

}  // namespace axsynth
