#include "axsynth/metrics/detection.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "../json_util.h"
#include "axsynth/errors.h"

namespace axsynth {
namespace {

struct ScoredMatch {
  double confidence;
  std::size_t image;
  std::size_t index;
  bool tp;
};

// Greedy matching of one class in one image. Returns tp flags per prediction
// index (in the image's prediction list) for predictions of `cls`.
void match_image_class(const DetectionImage& img, SimplifiedRole cls,
                       double threshold, std::size_t image_index,
                       std::vector<ScoredMatch>& out, std::size_t& npos) {
  std::vector<std::size_t> preds;
  for (std::size_t i = 0; i < img.predictions.size(); ++i) {
    if (img.predictions[i].cls == cls) preds.push_back(i);
  }
  std::vector<std::size_t> gts;
  for (std::size_t i = 0; i < img.ground_truth.size(); ++i) {
    if (img.ground_truth[i].cls == cls) gts.push_back(i);
  }
  npos += gts.size();
  std::stable_sort(preds.begin(), preds.end(), [&](std::size_t a, std::size_t b) {
    return img.predictions[a].confidence > img.predictions[b].confidence;
  });
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t p : preds) {
    const BBox& pb = img.predictions[p].bbox;
    std::optional<std::size_t> best;
    double best_iou = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(pb, img.ground_truth[gts[g]].bbox);
      if (v >= threshold && (!best || v > best_iou)) {
        best = g;
        best_iou = v;
      }
    }
    if (best) taken[*best] = true;
    out.push_back({img.predictions[p].confidence, image_index, p, best.has_value()});
  }
}

struct ClassEval {
  std::size_t tp = 0, fp = 0, npos = 0;
  std::optional<double> ap;
};

ClassEval evaluate_class(std::span<const DetectionImage> images,
                         SimplifiedRole cls, double threshold) {
  std::vector<ScoredMatch> matches;
  ClassEval ev;
  for (std::size_t i = 0; i < images.size(); ++i) {
    match_image_class(images[i], cls, threshold, i, matches, ev.npos);
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const ScoredMatch& a, const ScoredMatch& b) {
                     return a.confidence > b.confidence;
                   });
  for (const ScoredMatch& m : matches) (m.tp ? ev.tp : ev.fp)++;
  if (ev.npos == 0) return ev;

  std::vector<double> precision(matches.size()), recall(matches.size());
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    (matches[i].tp ? tp : fp)++;
    precision[i] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall[i] = static_cast<double>(tp) / static_cast<double>(ev.npos);
  }
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  ev.ap = sum / 101.0;
  return ev;
}

double safe_div(double num, double den) { return den > 0 ? num / den : 0.0; }

double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

}  // namespace

std::vector<double> coco_iou_thresholds() {
  std::vector<double> out;
  for (int k = 0; k < 10; ++k) out.push_back(0.5 + 0.05 * k);
  return out;
}

DetectionReport evaluate_detections(std::span<const DetectionImage> images,
                                    std::span<const double> iou_thresholds) {
  if (iou_thresholds.empty()) {
    throw ValidationError("evaluate_detections: empty IoU threshold list");
  }
  for (double t : iou_thresholds) {
    if (!(t > 0.0 && t < 1.0)) {
      throw ValidationError("evaluate_detections: threshold outside (0,1)");
    }
  }
  std::set<SimplifiedRole> classes;
  std::size_t total_preds = 0, total_gts = 0;
  for (const auto& img : images) {
    for (const auto& p : img.predictions) classes.insert(p.cls);
    for (const auto& g : img.ground_truth) classes.insert(g.cls);
    total_preds += img.predictions.size();
    total_gts += img.ground_truth.size();
  }

  DetectionReport report;
  report.iou_thresholds.assign(iou_thresholds.begin(), iou_thresholds.end());

  auto mean_ap = [&](double threshold,
                     std::vector<ClassDetectionStats>* per_class) {
    double sum = 0;
    std::size_t n = 0;
    for (SimplifiedRole cls : classes) {
      const ClassEval ev = evaluate_class(images, cls, threshold);
      if (ev.ap) {
        sum += *ev.ap;
        ++n;
      }
      if (per_class) {
        ClassDetectionStats s;
        s.cls = cls;
        s.tp = ev.tp;
        s.fp = ev.fp;
        s.fn = ev.npos - ev.tp;
        s.precision = safe_div(s.tp, s.tp + s.fp);
        s.recall = safe_div(s.tp, ev.npos);
        s.f1 = f1_of(s.precision, s.recall);
        s.ap50 = ev.ap;
        per_class->push_back(s);
      }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
  };

  report.map50 = mean_ap(0.5, &report.per_class);
  double sum = 0;
  for (double t : iou_thresholds) sum += mean_ap(t, nullptr);
  report.map50_95 = sum / static_cast<double>(iou_thresholds.size());

  for (const auto& s : report.per_class) {
    report.tp += s.tp;
    report.fp += s.fp;
    report.fn += s.fn;
  }
  report.precision = safe_div(report.tp, report.tp + report.fp);
  report.recall = safe_div(report.tp, report.tp + report.fn);
  report.f1 = f1_of(report.precision, report.recall);
  report.accuracy_at_50 = safe_div(report.tp, total_preds);
  report.accuracy_at_50_gt = safe_div(report.tp, total_gts);
  return report;
}

DetectionReport evaluate_detections(std::span<const DetectionImage> images) {
  const auto thresholds = coco_iou_thresholds();
  return evaluate_detections(images, thresholds);
}

DetectionReport evaluate_detections(std::span<const Detection> predictions,
                                    std::span<const GroundTruthBox> gts,
                                    std::span<const double> iou_thresholds) {
  DetectionImage img{{predictions.begin(), predictions.end()},
                     {gts.begin(), gts.end()}};
  return evaluate_detections(std::span(&img, 1), iou_thresholds);
}

std::string to_json(const DetectionReport& r) {
  using detail::Json;
  Json j = Json::object();
  j["accuracy_at_50"] = r.accuracy_at_50;
  j["accuracy_at_50_gt"] = r.accuracy_at_50_gt;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["map50"] = r.map50;
  j["map50_95"] = r.map50_95;
  j["iou_thresholds"] = r.iou_thresholds;
  Json per = Json::array();
  for (const auto& s : r.per_class) {
    Json c = Json::object();
    c["class"] = std::string(to_string(s.cls));
    c["tp"] = s.tp;
    c["fp"] = s.fp;
    c["fn"] = s.fn;
    c["precision"] = s.precision;
    c["recall"] = s.recall;
    c["f1"] = s.f1;
    c["ap50"] = s.ap50 ? Json(*s.ap50) : Json();
    per.push_back(std::move(c));
  }
  j["per_class"] = std::move(per);
  return j.dump(2);
}

}  // namespace axsynth
