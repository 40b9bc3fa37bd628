// Python bindings. Trees, reports and records cross the boundary as JSON
// text; the axsynth package converts to and from Python objects.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "axsynth/agent.h"
#include "axsynth/errors.h"
#include "axsynth/ingest.h"
#include "axsynth/metrics/caption.h"
#include "axsynth/metrics/detection.h"
#include "axsynth/metrics/tree_metrics.h"
#include "axsynth/pipeline.h"
#include "axsynth/tree.h"
#include "json.hpp"

namespace py = pybind11;
using Json = nlohmann::ordered_json;

namespace axsynth {
namespace {

std::string canonicalize_tree(const std::string& text) {
  return serialize_tree(parse_tree(text));
}

py::dict stats(const std::string& tree_json) {
  const TreeStats s = tree_stats(parse_tree(tree_json));
  py::dict d;
  d["node_count"] = s.node_count;
  d["element_count"] = s.element_count;
  d["group_count"] = s.group_count;
  d["max_depth"] = s.max_depth;
  return d;
}

std::string eval_tree(const std::string& pred, const std::string& gt, double match_iou,
                      double ged_budget, bool ged_refine) {
  TreeEvalOptions opt;
  opt.match_iou = match_iou;
  opt.ged.time_budget = std::chrono::duration<double>(ged_budget);
  opt.ged.refine = ged_refine;
  const AXNode p = parse_tree(pred);
  const AXNode g = parse_tree(gt);
  py::gil_scoped_release release;
  return to_json(evaluate_tree(p, g, opt));
}

py::dict ged(const std::string& pred, const std::string& gt, double budget, bool refine) {
  GedOptions opt;
  opt.time_budget = std::chrono::duration<double>(budget);
  opt.refine = refine;
  const AXNode p = parse_tree(pred);
  const AXNode g = parse_tree(gt);
  GedResult r;
  {
    py::gil_scoped_release release;
    r = ged_upper_bound(p, g, opt);
  }
  py::dict d;
  d["ged"] = r.ged;
  d["is_fallback"] = r.is_fallback;
  d["proven_optimal"] = r.proven_optimal;
  return d;
}

std::vector<Detection> detections_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_detections(in);
}

// images: list of (predictions JSONL, ground truth JSONL).
std::string eval_detections(const std::vector<std::pair<std::string, std::string>>& images,
                            std::optional<std::vector<double>> thresholds) {
  std::vector<DetectionImage> data;
  for (const auto& [pred, gt] : images) {
    DetectionImage img;
    img.predictions = detections_from_jsonl(pred);
    for (const Detection& d : detections_from_jsonl(gt)) {
      img.ground_truth.push_back({d.bbox, d.cls});
    }
    data.push_back(std::move(img));
  }
  const std::vector<double> t = thresholds ? *thresholds : coco_iou_thresholds();
  return to_json(evaluate_detections(data, t));
}

py::dict cider_scores(const std::vector<std::string>& candidates,
                      const std::vector<std::vector<std::string>>& references) {
  const CiderResult r = cider(candidates, references);
  py::dict d;
  d["raw"] = r.raw;
  d["raw_mean"] = r.raw_mean;
  d["normalized"] = r.normalized;
  d["mean"] = r.mean;
  return d;
}

std::string build(const std::string& image_id, double width, double height,
                  const std::string& detections, const std::string& ocr,
                  const std::string& captions, const std::string& groups,
                  const std::string& mode, const std::string& config) {
  const auto m = group_mode_from_string(mode);
  if (!m) throw ValidationError("mode must be heuristic, model or union");
  BuildInputs in;
  in.image_id = image_id;
  in.window = {width, height};
  in.detections = detections_from_jsonl(detections);
  std::istringstream ocr_in(ocr), cap_in(captions), grp_in(groups);
  in.ocr = read_ocr(ocr_in);
  in.captions = read_captions(cap_in);
  in.model_groups = read_groups(grp_in);
  const PipelineConfig cfg = config.empty() ? PipelineConfig{} : parse_pipeline_config(config);
  cfg.validate();
  return serialize_tree(build_tree(in, *m, cfg));
}

Representation rep_of(const std::string& s) {
  const auto r = representation_from_string(s);
  if (!r) throw ValidationError("representation must be hierarchical or flat");
  return *r;
}

std::vector<std::pair<std::string, std::string>> validate(const std::string& content,
                                                          const std::string& kind) {
  const auto k = file_kind_from_string(kind);
  if (!k) throw ValidationError("unknown kind " + kind);
  std::vector<std::pair<std::string, std::string>> out;
  for (const Finding& f : validate_text(content, *k)) out.emplace_back(f.location, f.message);
  return out;
}

}  // namespace
}  // namespace axsynth

PYBIND11_MODULE(_core, m) {
  using namespace axsynth;
  m.doc() = "Accessibility tree synthesis and evaluation";

  static py::exception<Error> error(m, "Error");
  static py::exception<ParseError> parse_error(m, "ParseError", error.ptr());
  static py::exception<ValidationError> validation_error(m, "ValidationError", error.ptr());
  static py::exception<ClientError> client_error(m, "ClientError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      parse_error(e.what());
    } catch (const ValidationError& e) {
      validation_error(e.what());
    } catch (const ClientError& e) {
      client_error(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  m.def("canonicalize_tree", &canonicalize_tree, py::arg("tree_json"));
  m.def("tree_stats", &stats, py::arg("tree_json"));
  m.def("evaluate_tree", &eval_tree, py::arg("pred_json"), py::arg("gt_json"),
        py::arg("match_iou") = 0.5, py::arg("ged_budget") = 10.0,
        py::arg("ged_refine") = false);
  m.def("ged_upper_bound", &ged, py::arg("pred_json"), py::arg("gt_json"),
        py::arg("time_budget") = 10.0, py::arg("refine") = false);
  m.def("evaluate_detections", &eval_detections, py::arg("images"),
        py::arg("iou_thresholds") = std::nullopt);
  m.def("cider", &cider_scores, py::arg("candidates"), py::arg("references"));
  m.def("build_judge_prompt", [](const std::string& a, const std::string& b) {
    return build_judge_prompt(a, b);
  });
  m.def("parse_judge_answer", [](const std::string& s) { return parse_judge_answer(s); });
  m.def("build_tree", &build, py::arg("image_id"), py::arg("width"), py::arg("height"),
        py::arg("detections"), py::arg("ocr") = "", py::arg("captions") = "",
        py::arg("groups") = "", py::arg("mode") = "heuristic", py::arg("config") = "");
  m.def("render_ax_json", [](const std::string& tree, const std::string& rep) {
    return render_ax_json(parse_tree(tree), rep_of(rep));
  }, py::arg("tree_json"), py::arg("representation") = "hierarchical");
  m.def("build_agent_prompt", [](const std::string& ax_json, const std::string& command) {
    return build_prompt(ax_json, build_task_action(command));
  }, py::arg("ax_json"), py::arg("command"));
  m.def("parse_id", [](const std::string& response, int n) -> py::object {
    const IdParse p = parse_id(response, n);
    if (p.id) return py::int_(*p.id);
    return py::str(std::string(to_string(*p.error)));
  }, py::arg("response"), py::arg("n"));
  m.def("validate_text", &validate, py::arg("content"), py::arg("kind"));
}
