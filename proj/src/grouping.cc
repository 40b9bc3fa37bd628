#include "axsynth/grouping.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "axsynth/errors.h"

namespace axsynth {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Components with at least two members, members ascending, clusters in
// reading order of their union box.
template <typename BoxAt>
std::vector<Cluster> clusters_from_sets(DisjointSets& sets, std::size_t n,
                                        BoxAt&& box_at, ClusterKind kind,
                                        bool members_are_texts) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);
  std::vector<Cluster> out;
  for (auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    Cluster c;
    c.kind = kind;
    c.bbox = box_at(members.front());
    for (std::size_t m : members) c.bbox = union_box(c.bbox, box_at(m));
    (members_are_texts ? c.texts : c.elements) = std::move(members);
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Cluster& a, const Cluster& b) {
                     return reading_order_less(a.bbox, b.bbox);
                   });
  return out;
}

// Signed gap between two intervals; negative when they overlap.
double axis_gap(double a0, double a1, double b0, double b1) {
  return std::max(a0, b0) - std::min(a1, b1);
}

double overlap_fraction(double a0, double a1, double b0, double b1) {
  const double extent = std::min(a1 - a0, b1 - b0);
  if (extent <= 0) return 0.0;
  return interval_overlap(a0, a1, b0, b1) / extent;
}

bool in_unit_interval(double v) { return v > 0.0 && v <= 1.0; }

// Square-kernel erosion or dilation along one axis via a sliding count.
// Window offsets are [-lo, hi]. Out-of-range samples read as `border`.
void sweep(const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out,
           int width, int height, bool horizontal, int lo, int hi,
           bool erode, std::uint8_t border) {
  const int len = horizontal ? width : height;
  const int lines = horizontal ? height : width;
  std::vector<int> prefix(static_cast<std::size_t>(len) + 1);
  for (int line = 0; line < lines; ++line) {
    auto at = [&](int i) -> std::size_t {
      return horizontal ? static_cast<std::size_t>(line) * width + i
                        : static_cast<std::size_t>(i) * width + line;
    };
    prefix[0] = 0;
    for (int i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + (in[at(i)] ? 1 : 0);
    for (int i = 0; i < len; ++i) {
      const int a = i - lo, b = i + hi;  // inclusive window
      const int ca = std::max(a, 0), cb = std::min(b, len - 1);
      const int inside = cb - ca + 1;
      const int ones = prefix[cb + 1] - prefix[ca];
      const int outside = (b - a + 1) - inside;
      const int total_ones = ones + (border ? outside : 0);
      const int window = b - a + 1;
      out[at(i)] = erode ? (total_ones == window) : (total_ones > 0);
    }
  }
}

std::vector<std::uint8_t> open_mask(const std::vector<std::uint8_t>& mask,
                                    int width, int height, int kernel) {
  const int lo = kernel / 2;
  const int hi = kernel - 1 - lo;
  std::vector<std::uint8_t> tmp(mask.size()), eroded(mask.size());
  sweep(mask, tmp, width, height, true, lo, hi, true, 1);
  sweep(tmp, eroded, width, height, false, lo, hi, true, 1);
  // Dilation uses the reflected kernel so the result is a true opening.
  std::vector<std::uint8_t> opened(mask.size());
  sweep(eroded, tmp, width, height, true, hi, lo, false, 0);
  sweep(tmp, opened, width, height, false, hi, lo, false, 0);
  return opened;
}

// 8-connected component bounding boxes, in scan order of first pixel.
std::vector<BBox> component_boxes(const std::vector<std::uint8_t>& mask,
                                  int width, int height) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<BBox> boxes;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      if (!mask[i] || seen[i]) continue;
      int x0 = x, x1 = x, y0 = y, y1 = y;
      seen[i] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * width + nx;
            if (mask[n] && !seen[n]) {
              seen[n] = 1;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
      boxes.push_back({static_cast<double>(x0), static_cast<double>(y0),
                       static_cast<double>(x1 - x0 + 1),
                       static_cast<double>(y1 - y0 + 1)});
    }
  }
  return boxes;
}

}  // namespace

void GroupingConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw ValidationError("grouping config: " + what);
  };
  for (auto [name, v] : {std::pair{"caption_x_overlap_min", caption_x_overlap_min},
                         {"caption_vgap_frac", caption_vgap_frac},
                         {"caption_y_overlap_min", caption_y_overlap_min},
                         {"caption_hgap_frac", caption_hgap_frac},
                         {"min_region_frac", min_region_frac},
                         {"max_region_frac", max_region_frac},
                         {"containment_threshold", containment_threshold}}) {
    if (!in_unit_interval(v)) fail(std::string(name) + " must lie in (0,1]");
  }
  for (auto [name, v] : {std::pair{"column_gap_factor", column_gap_factor},
                         {"row_gap_factor", row_gap_factor}}) {
    if (!(v > 0 && std::isfinite(v))) fail(std::string(name) + " must be > 0");
  }
  for (auto [name, v] : {std::pair{"text_vertical_pad", text_vertical_pad},
                         {"column_edge_tol", column_edge_tol},
                         {"row_edge_tol", row_edge_tol}}) {
    if (!(v >= 0 && std::isfinite(v))) fail(std::string(name) + " must be >= 0");
  }
  if (color_top_k < 1) fail("color_top_k must be >= 1");
  if (color_quant_bits < 1 || color_quant_bits > 8) {
    fail("color_quant_bits must lie in [1,8]");
  }
  if (opening_kernel < 1) fail("opening_kernel must be >= 1");
  if (min_region_frac > max_region_frac) {
    fail("min_region_frac exceeds max_region_frac");
  }
}

std::string_view to_string(ClusterKind kind) {
  return to_string(to_group_source(kind));
}

GroupSource to_group_source(ClusterKind kind) {
  switch (kind) {
    case ClusterKind::kText:
      return GroupSource::kText;
    case ClusterKind::kCaption:
      return GroupSource::kCaption;
    case ClusterKind::kColumn:
      return GroupSource::kColumn;
    case ClusterKind::kRow:
      return GroupSource::kRow;
    case ClusterKind::kColor:
      return GroupSource::kColor;
  }
  return GroupSource::kText;
}

std::vector<Cluster> group_text(std::span<const TextBox> texts,
                                const GroupingConfig& cfg) {
  std::vector<std::size_t> order(texts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const BBox& ba = texts[a].bbox;
    const BBox& bb = texts[b].bbox;
    return std::tie(ba.y, ba.x) < std::tie(bb.y, bb.x);
  });
  DisjointSets sets(texts.size());
  for (std::size_t k = 1; k < order.size(); ++k) {
    const BBox& t1 = texts[order[k - 1]].bbox;
    const BBox& t2 = texts[order[k]].bbox;
    const bool x_overlap = interval_overlap(t1.x, t1.right(), t2.x, t2.right()) > 0;
    const double spacing = t2.y - t1.bottom();
    const double threshold = std::min(t1.h, t2.h) + cfg.text_vertical_pad;
    if (x_overlap && spacing < threshold) sets.unite(order[k - 1], order[k]);
  }
  return clusters_from_sets(
      sets, texts.size(), [&](std::size_t i) { return texts[i].bbox; },
      ClusterKind::kText, /*members_are_texts=*/true);
}

std::vector<Cluster> associate_captions(
    std::span<const DescribedElement> elements, std::span<const TextBox> texts,
    ScreenSize screen, const GroupingConfig& cfg) {
  if (!(screen.width > 0 && screen.height > 0)) {
    throw ValidationError("associate_captions: screen size must be positive");
  }
  std::vector<Cluster> out;
  for (std::size_t ti = 0; ti < texts.size(); ++ti) {
    const BBox& t = texts[ti].bbox;
    std::optional<std::size_t> best;
    double best_dist = 0;
    for (std::size_t ei = 0; ei < elements.size(); ++ei) {
      const SimplifiedRole cls = elements[ei].detection.cls;
      if (cls != SimplifiedRole::kImage && cls != SimplifiedRole::kButton) {
        continue;
      }
      const BBox& e = elements[ei].detection.bbox;
      const bool stacked =
          overlap_fraction(e.x, e.right(), t.x, t.right()) >=
              cfg.caption_x_overlap_min &&
          axis_gap(e.y, e.bottom(), t.y, t.bottom()) / screen.height <
              cfg.caption_vgap_frac;
      const bool beside =
          overlap_fraction(e.y, e.bottom(), t.y, t.bottom()) >=
              cfg.caption_y_overlap_min &&
          axis_gap(e.x, e.right(), t.x, t.right()) / screen.width <
              cfg.caption_hgap_frac;
      if (!stacked && !beside) continue;
      const double dist = std::hypot(e.center_x() - t.center_x(),
                                     e.center_y() - t.center_y());
      if (!best || dist < best_dist) {
        best = ei;
        best_dist = dist;
      }
    }
    if (!best) continue;
    Cluster c;
    c.kind = ClusterKind::kCaption;
    c.elements = {*best};
    c.texts = {ti};
    c.bbox = union_box(elements[*best].detection.bbox, t);
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    return reading_order_less(a.bbox, b.bbox);
  });
  return out;
}

std::vector<Cluster> form_lines(std::span<const BBox> boxes, LineAxis axis,
                                const GroupingConfig& cfg) {
  DisjointSets sets(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      const BBox& a = boxes[i];
      const BBox& b = boxes[j];
      bool linked;
      if (axis == LineAxis::kColumn) {
        linked = axis_gap(a.y, a.bottom(), b.y, b.bottom()) <
                     cfg.column_gap_factor * std::min(a.h, b.h) &&
                 (std::fabs(a.x - b.x) < cfg.column_edge_tol ||
                  std::fabs(a.right() - b.right()) < cfg.column_edge_tol);
      } else {
        linked = axis_gap(a.x, a.right(), b.x, b.right()) <
                     cfg.row_gap_factor * std::min(a.w, b.w) &&
                 (std::fabs(a.y - b.y) < cfg.row_edge_tol ||
                  std::fabs(a.bottom() - b.bottom()) < cfg.row_edge_tol);
      }
      if (linked) sets.unite(i, j);
    }
  }
  return clusters_from_sets(
      sets, boxes.size(), [&](std::size_t i) { return boxes[i]; },
      axis == LineAxis::kColumn ? ClusterKind::kColumn : ClusterKind::kRow,
      /*members_are_texts=*/false);
}

std::vector<GroupBox> color_regions(const Raster& image,
                                    const GroupingConfig& cfg) {
  cfg.validate();
  if (image.empty()) throw Error("color_regions: empty image");
  const int width = image.width(), height = image.height();
  const int bits = cfg.color_quant_bits;
  const int shift = 8 - bits;
  const std::size_t n = static_cast<std::size_t>(width) * height;

  std::vector<std::uint32_t> keys(n);
  std::unordered_map<std::uint32_t, std::size_t> counts;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Rgb c = image.at(x, y);
      const std::uint32_t key = (static_cast<std::uint32_t>(c.r >> shift) << (2 * bits)) |
                                (static_cast<std::uint32_t>(c.g >> shift) << bits) |
                                static_cast<std::uint32_t>(c.b >> shift);
      keys[static_cast<std::size_t>(y) * width + x] = key;
      ++counts[key];
    }
  }
  std::vector<std::pair<std::uint32_t, std::size_t>> ranked(counts.begin(),
                                                            counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(cfg.color_top_k)) {
    ranked.resize(static_cast<std::size_t>(cfg.color_top_k));
  }

  const double screen_area = static_cast<double>(width) * height;
  std::vector<GroupBox> out;
  std::vector<std::uint8_t> mask(n);
  for (const auto& [key, count] : ranked) {
    for (std::size_t i = 0; i < n; ++i) mask[i] = keys[i] == key;
    const auto opened = open_mask(mask, width, height, cfg.opening_kernel);
    std::vector<BBox> boxes;
    for (const BBox& b : component_boxes(opened, width, height)) {
      const double frac = b.area() / screen_area;
      if (frac >= cfg.min_region_frac && frac <= cfg.max_region_frac) {
        boxes.push_back(b);
      }
    }
    std::stable_sort(boxes.begin(), boxes.end(), reading_order_less);
    for (const BBox& b : boxes) out.push_back({b, 1.0, GroupSource::kColor});
  }
  return out;
}

std::vector<GroupBox> heuristic_groups(
    std::span<const DescribedElement> elements, std::span<const TextBox> texts,
    const Raster* image, ScreenSize screen, const GroupingConfig& cfg) {
  cfg.validate();
  std::vector<BBox> element_boxes;
  element_boxes.reserve(elements.size());
  for (const auto& e : elements) element_boxes.push_back(e.detection.bbox);

  std::vector<GroupBox> out;
  auto emit = [&](const std::vector<Cluster>& clusters) {
    for (const Cluster& c : clusters) {
      out.push_back({c.bbox, 1.0, to_group_source(c.kind)});
    }
  };
  emit(group_text(texts, cfg));
  emit(associate_captions(elements, texts, screen, cfg));
  emit(form_lines(element_boxes, LineAxis::kColumn, cfg));
  emit(form_lines(element_boxes, LineAxis::kRow, cfg));
  if (image != nullptr) {
    for (const GroupBox& g : color_regions(*image, cfg)) {
      std::size_t inside = 0;
      for (const BBox& b : element_boxes) {
        inside += containment(b, g.bbox) >= cfg.containment_threshold;
      }
      for (const TextBox& t : texts) {
        inside += containment(t.bbox, g.bbox) >= cfg.containment_threshold;
      }
      if (inside >= 2) out.push_back(g);
    }
  }
  return out;
}

}  // namespace axsynth
