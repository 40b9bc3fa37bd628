#include "axsynth/describe.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "axsynth/errors.h"

namespace axsynth {

std::string_view to_string(DescriptionSource source) {
  switch (source) {
    case DescriptionSource::kNone:
      return "none";
    case DescriptionSource::kOcr:
      return "ocr";
    case DescriptionSource::kCaption:
      return "caption";
  }
  return "none";
}

TextBinding bind_text_detailed(std::span<const Detection> elements,
                               std::span<const OcrLine> ocr,
                               double containment_threshold) {
  if (!(containment_threshold > 0.0 && containment_threshold <= 1.0)) {
    throw ValidationError("containment threshold must lie in (0,1]");
  }
  TextBinding out;
  out.elements.reserve(elements.size());
  for (const Detection& d : elements) out.elements.push_back({d, {}, {}});
  out.line_bound.assign(ocr.size(), false);

  std::vector<std::vector<std::size_t>> bound(elements.size());
  for (std::size_t li = 0; li < ocr.size(); ++li) {
    std::optional<std::size_t> best;
    double best_area = 0, best_ratio = 0;
    for (std::size_t ei = 0; ei < elements.size(); ++ei) {
      const double ratio = containment(ocr[li].bbox, elements[ei].bbox);
      if (ratio < containment_threshold) continue;
      const double area = elements[ei].bbox.area();
      if (!best || area < best_area ||
          (area == best_area && ratio > best_ratio)) {
        best = ei;
        best_area = area;
        best_ratio = ratio;
      }
    }
    if (best) {
      bound[*best].push_back(li);
      out.line_bound[li] = true;
    }
  }

  for (std::size_t ei = 0; ei < elements.size(); ++ei) {
    auto& lines = bound[ei];
    if (lines.empty()) continue;
    std::stable_sort(lines.begin(), lines.end(),
                     [&](std::size_t a, std::size_t b) {
                       const BBox& ba = ocr[a].bbox;
                       const BBox& bb = ocr[b].bbox;
                       return std::tie(ba.y, ba.x) < std::tie(bb.y, bb.x);
                     });
    std::string text;
    for (std::size_t li : lines) {
      if (!text.empty()) text.push_back(' ');
      text += ocr[li].text;
    }
    out.elements[ei].description = std::move(text);
    out.elements[ei].source = DescriptionSource::kOcr;
  }
  return out;
}

std::vector<DescribedElement> bind_text(std::span<const Detection> elements,
                                        std::span<const OcrLine> ocr,
                                        double containment_threshold) {
  return bind_text_detailed(elements, ocr, containment_threshold).elements;
}

std::vector<DescribedElement> assign_descriptions(
    std::span<const DescribedElement> elements,
    std::span<const CaptionRecord> captions, std::string_view image_id) {
  std::unordered_map<std::string, const std::string*> by_key;
  for (const CaptionRecord& c : captions) {
    by_key.emplace(c.element_key, &c.caption);
  }
  std::vector<DescribedElement> out(elements.begin(), elements.end());
  for (DescribedElement& e : out) {
    if (e.source != DescriptionSource::kNone) continue;
    auto it = by_key.find(element_key(image_id, e.detection.bbox));
    if (it == by_key.end()) continue;
    e.description = *it->second;
    e.source = DescriptionSource::kCaption;
  }
  return out;
}

}  // namespace axsynth
