#include "axsynth/geometry.h"

#include <cmath>

namespace axsynth {

bool BBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w >= 0 && h >= 0;
}

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = interval_overlap(a.x, a.right(), b.x, b.right());
  const double ih = interval_overlap(a.y, a.bottom(), b.y, b.bottom());
  if (iw <= 0 || ih <= 0) return 0.0;
  return iw * ih;
}

BBox union_box(const BBox& a, const BBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.right(), b.right());
  const double y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

namespace {

// Area from edge coordinates, so that it agrees bit for bit with
// intersection_area of a box with itself.
double edge_area(const BBox& b) {
  return (b.right() - b.x) * (b.bottom() - b.y);
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = edge_area(a) + edge_area(b) - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double containment(const BBox& inner, const BBox& outer) {
  const double area = edge_area(inner);
  if (area <= 0) return outer.contains_point(inner.x, inner.y) ? 1.0 : 0.0;
  return std::clamp(intersection_area(inner, outer) / area, 0.0, 1.0);
}

}  // namespace axsynth
