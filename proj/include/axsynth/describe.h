#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axsynth/ingest.h"

namespace axsynth {

enum class DescriptionSource { kNone, kOcr, kCaption };

std::string_view to_string(DescriptionSource source);

// A detection plus the text that describes it. Invariant: kNone has no
// description; kOcr carries the joined text of the OCR lines bound to it.
struct DescribedElement {
  Detection detection;
  std::optional<std::string> description;
  DescriptionSource source = DescriptionSource::kNone;

  friend bool operator==(const DescribedElement&,
                         const DescribedElement&) = default;
};

inline constexpr double kDefaultTextContainment = 0.8;

struct TextBinding {
  std::vector<DescribedElement> elements;  // same order as the detections
  std::vector<bool> line_bound;            // per OCR line
};

// Binds each OCR line to the smallest element that contains at least
// `containment_threshold` of it. Lines bound to one element are joined in
// reading order (y, then x of the line origin) with single spaces. Throws
// ValidationError unless the threshold is in (0,1].
TextBinding bind_text_detailed(std::span<const Detection> elements,
                               std::span<const OcrLine> ocr,
                               double containment_threshold =
                                   kDefaultTextContainment);

std::vector<DescribedElement> bind_text(
    std::span<const Detection> elements, std::span<const OcrLine> ocr,
    double containment_threshold = kDefaultTextContainment);

// Fills elements still lacking a description from caption records keyed by
// element_key(image_id, bbox). OCR-described elements are left untouched.
std::vector<DescribedElement> assign_descriptions(
    std::span<const DescribedElement> elements,
    std::span<const CaptionRecord> captions, std::string_view image_id);

}  // namespace axsynth
