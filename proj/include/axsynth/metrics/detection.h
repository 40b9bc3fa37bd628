#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axsynth/geometry.h"
#include "axsynth/ingest.h"
#include "axsynth/role.h"

namespace axsynth {

struct GroundTruthBox {
  BBox bbox;
  SimplifiedRole cls = SimplifiedRole::kButton;
};

// Predictions and ground truth for one screenshot.
struct DetectionImage {
  std::vector<Detection> predictions;
  std::vector<GroundTruthBox> ground_truth;
};

struct ClassDetectionStats {
  SimplifiedRole cls = SimplifiedRole::kButton;
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
  // Absent when the class has no ground truth.
  std::optional<double> ap50;
};

struct DetectionReport {
  // Matched predictions over all predictions at IoU 0.5.
  double accuracy_at_50 = 0;
  // Same numerator over ground-truth boxes.
  double accuracy_at_50_gt = 0;
  // Micro-averaged over classes at IoU 0.5.
  double precision = 0, recall = 0, f1 = 0;
  std::size_t tp = 0, fp = 0, fn = 0;
  std::vector<ClassDetectionStats> per_class;
  double map50 = 0;
  double map50_95 = 0;
  std::vector<double> iou_thresholds;
};

// 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

// Per image and class, predictions in descending confidence each take the
// unmatched ground truth of highest IoU >= threshold. AP uses 101-point
// interpolation over the precision envelope; map50_95 averages mAP over
// `iou_thresholds`. Throws ValidationError on an empty threshold list or a
// threshold outside (0,1).
DetectionReport evaluate_detections(
    std::span<const DetectionImage> images,
    std::span<const double> iou_thresholds);
DetectionReport evaluate_detections(std::span<const DetectionImage> images);

// Single-image convenience.
DetectionReport evaluate_detections(std::span<const Detection> predictions,
                                    std::span<const GroundTruthBox> gts,
                                    std::span<const double> iou_thresholds);

std::string to_json(const DetectionReport& report);

}  // namespace axsynth
