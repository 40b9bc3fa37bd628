// axsynth command-line tool.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "axsynth/agent.h"
#include "axsynth/errors.h"
#include "axsynth/ingest.h"
#include "axsynth/io.h"
#include "axsynth/llm_client.h"
#include "axsynth/metrics/caption.h"
#include "axsynth/metrics/detection.h"
#include "axsynth/metrics/tree_metrics.h"
#include "axsynth/overlay.h"
#include "axsynth/pipeline.h"
#include "axsynth/raster.h"
#include "axsynth/tree.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace axsynth {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Runs fn(i) over [0, n) on `jobs` threads; errors surface in index order.
template <typename Fn>
void for_each_parallel(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t w = std::clamp<std::size_t>(jobs > 0 ? jobs : 1, 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < w; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  } else {
    write_file_atomic(out_path, content.back() == '\n' ? content : content + "\n");
  }
}

AXNode load_tree(const fs::path& p) { return parse_tree(read_file(p)); }

std::optional<ScreenSize> dims_of(double w, double h) {
  if (w > 0 && h > 0) return ScreenSize{w, h};
  return std::nullopt;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

struct PairRow {
  std::string image_id;
  fs::path pred, gt;
  std::optional<ScreenSize> dims;
};

// JSONL rows {image_id, pred_path, gt_path[, image_width, image_height]},
// returned sorted by image_id.
std::vector<PairRow> load_pairs(const fs::path& path) {
  std::vector<PairRow> rows;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("image_id") ||
        !j.contains("pred_path") || !j.contains("gt_path") || !j["image_id"].is_string() ||
        !j["pred_path"].is_string() || !j["gt_path"].is_string()) {
      throw ParseError("pairs row needs image_id, pred_path, gt_path strings", n);
    }
    PairRow r;
    r.image_id = j["image_id"].get<std::string>();
    r.pred = resolve(path.parent_path(), j["pred_path"].get<std::string>());
    r.gt = resolve(path.parent_path(), j["gt_path"].get<std::string>());
    if (j.contains("image_width") && j.contains("image_height")) {
      r.dims = ScreenSize{j["image_width"].get<double>(), j["image_height"].get<double>()};
    }
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const PairRow& a, const PairRow& b) { return a.image_id < b.image_id; });
  return rows;
}

std::unique_ptr<ChatClient> make_client(const std::string& mock_path, int concurrency) {
  if (!mock_path.empty()) {
    return std::make_unique<MockChatClient>(MockChatClient::load(mock_path, concurrency));
  }
  ChatConfig cfg = ChatConfig::from_env();
  if (concurrency > 0) cfg.max_concurrency = concurrency;
  return std::make_unique<HttpChatClient>(cfg);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct BuildArgs {
  std::string manifest;
  std::string groups = "heuristic";
  std::string config;
  int jobs = 1;
};

int run_build(const BuildArgs& a) {
  const auto mode = group_mode_from_string(a.groups);
  if (!mode) throw ValidationError("--groups must be heuristic, model or union");
  const PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_pipeline_config(a.config);
  cfg.validate();
  auto manifests = load_run_manifests(a.manifest);
  std::stable_sort(manifests.begin(), manifests.end(),
                   [](const RunManifest& x, const RunManifest& y) { return x.image_id < y.image_id; });
  for_each_parallel(manifests.size(), a.jobs, [&](std::size_t i) {
    const AXNode tree = build_tree(manifests[i], *mode, cfg);
    write_file_atomic(manifests[i].output_tree_path, serialize_tree(tree) + "\n");
  });
  for (const auto& m : manifests) {
    std::cout << m.image_id << '\t' << m.output_tree_path.string() << '\n';
  }
  return kExitOk;
}

struct EvalTreeArgs {
  std::string pred, gt, pairs, out, csv;
  double match_iou = 0.5;
  double ged_budget = 10.0;
  bool ged_refine = false;
  int jobs = 1;
};

Json tree_report_json(const TreeReport& r) { return Json::parse(to_json(r)); }

int run_eval_tree(const EvalTreeArgs& a) {
  TreeEvalOptions opt;
  opt.match_iou = a.match_iou;
  opt.ged.time_budget = std::chrono::duration<double>(a.ged_budget);
  opt.ged.refine = a.ged_refine;
  if (a.pairs.empty()) {
    if (a.pred.empty() || a.gt.empty()) throw ValidationError("eval-tree needs PRED GT or --pairs");
    const TreeReport r = evaluate_tree(load_tree(a.pred), load_tree(a.gt), opt);
    emit(to_json(r), a.out);
    return kExitOk;
  }
  const auto rows = load_pairs(a.pairs);
  std::vector<TreeReport> reports(rows.size());
  for_each_parallel(rows.size(), a.jobs, [&](std::size_t i) {
    reports[i] = evaluate_tree(load_tree(rows[i].pred), load_tree(rows[i].gt), opt);
  });
  Json images = Json::array();
  TreeReport mean;
  std::size_t fallbacks = 0;
  std::string csv = "image_id,edge_f1,leaves_f1,ged,ged_is_fallback,container_match\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Json j = Json::object();
    j["image_id"] = rows[i].image_id;
    const Json report = tree_report_json(reports[i]);
    for (auto& [k, v] : report.items()) j[k] = v;
    images.push_back(std::move(j));
    mean.edge_f1 += reports[i].edge_f1;
    mean.leaves_f1 += reports[i].leaves_f1;
    mean.ged += reports[i].ged;
    mean.container_match += reports[i].container_match;
    fallbacks += reports[i].ged_is_fallback;
    csv += csv_field(rows[i].image_id) + "," + fmt(reports[i].edge_f1) + "," +
           fmt(reports[i].leaves_f1) + "," + fmt(reports[i].ged) + "," +
           (reports[i].ged_is_fallback ? "true" : "false") + "," +
           fmt(reports[i].container_match) + "\n";
  }
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  Json m = Json::object();
  m["edge_f1"] = mean.edge_f1 / n;
  m["leaves_f1"] = mean.leaves_f1 / n;
  m["ged"] = mean.ged / n;
  m["ged_fallbacks"] = fallbacks;
  m["container_match"] = mean.container_match / n;
  Json out = Json::object();
  out["images"] = std::move(images);
  out["mean"] = std::move(m);
  emit(out.dump(2), a.out);
  if (!a.csv.empty()) write_file_atomic(a.csv, csv);
  return kExitOk;
}

struct EvalDetArgs {
  std::string pred, gt, pairs, out, csv;
  double width = 0, height = 0;
  std::vector<double> thresholds;
};

int run_eval_det(const EvalDetArgs& a) {
  std::vector<std::string> ids;
  std::vector<DetectionImage> images;
  auto load_image = [](const fs::path& pred, const fs::path& gt, std::optional<ScreenSize> dims) {
    DetectionImage img;
    img.predictions = load_detections(pred, dims);
    for (const Detection& d : load_detections(gt, dims)) img.ground_truth.push_back({d.bbox, d.cls});
    return img;
  };
  if (a.pairs.empty()) {
    if (a.pred.empty() || a.gt.empty()) throw ValidationError("eval-det needs PRED GT or --pairs");
    ids.push_back("");
    images.push_back(load_image(a.pred, a.gt, dims_of(a.width, a.height)));
  } else {
    for (const PairRow& r : load_pairs(a.pairs)) {
      ids.push_back(r.image_id);
      images.push_back(load_image(r.pred, r.gt, r.dims ? r.dims : dims_of(a.width, a.height)));
    }
  }
  const std::vector<double> thresholds = a.thresholds.empty() ? coco_iou_thresholds() : a.thresholds;
  emit(to_json(evaluate_detections(images, thresholds)), a.out);
  if (!a.csv.empty()) {
    std::string csv = "image_id,predictions,ground_truth,tp,fp,fn,precision,recall,f1,accuracy_at_50\n";
    for (std::size_t i = 0; i < images.size(); ++i) {
      const DetectionReport r = evaluate_detections(std::span(&images[i], 1), thresholds);
      csv += csv_field(ids[i]) + "," + std::to_string(images[i].predictions.size()) + "," +
             std::to_string(images[i].ground_truth.size()) + "," + std::to_string(r.tp) + "," +
             std::to_string(r.fp) + "," + std::to_string(r.fn) + "," + fmt(r.precision) + "," +
             fmt(r.recall) + "," + fmt(r.f1) + "," + fmt(r.accuracy_at_50) + "\n";
    }
    write_file_atomic(a.csv, csv);
  }
  return kExitOk;
}

struct EvalCaptionArgs {
  std::string candidates, refs, out, mock_client;
  bool judge = false;
  int concurrency = 4;
};

int run_eval_caption(const EvalCaptionArgs& a) {
  const auto cands = load_captions(a.candidates);
  std::ifstream rin(a.refs);
  if (!rin) throw Error("cannot open " + a.refs);
  std::map<std::string, std::vector<std::string>> refs;
  for (auto& r : read_reference_captions(rin)) refs[r.element_key].push_back(r.caption);

  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& c : cands) items.emplace_back(c.element_key, c.caption);
  std::sort(items.begin(), items.end());
  std::vector<std::string> hyp;
  std::vector<std::vector<std::string>> ref;
  std::vector<std::pair<std::string, std::string>> judge_pairs;
  for (const auto& [key, caption] : items) {
    auto it = refs.find(key);
    if (it == refs.end()) throw ValidationError("no reference caption for " + key);
    hyp.push_back(caption);
    ref.push_back(it->second);
    judge_pairs.emplace_back(it->second.front(), caption);
  }
  CaptionReport report;
  report.items = items.size();
  if (!items.empty()) {
    const CiderResult c = cider(hyp, ref);
    report.cider = c.mean;
    report.cider_raw = c.raw_mean;
  }
  if (a.judge) {
    auto client = make_client(a.mock_client, a.concurrency);
    const JudgeResult j = judge_accuracy(judge_pairs, *client);
    report.judge_accuracy = j.accuracy;
    report.judge_malformed = j.malformed;
  }
  emit(to_json(report), a.out);
  return kExitOk;
}

struct BenchArgs {
  std::string manifest, rep = "hier", mock_client, out, summary;
  int concurrency = 4;
};

int run_bench_agent(const BenchArgs& a) {
  const auto rep = representation_from_string(a.rep);
  if (!rep) throw ValidationError("--rep must be hier or flat");
  const auto rows = load_benchmark_manifest(a.manifest);
  std::map<fs::path, AXNode> trees;
  for (const auto& r : rows) {
    if (!trees.count(r.tree_path)) trees.emplace(r.tree_path, load_tree(r.tree_path));
  }
  std::vector<BenchmarkCase> cases;
  for (const auto& r : rows) cases.push_back({r.image_id, r.record, &trees.at(r.tree_path)});
  auto client = make_client(a.mock_client, a.concurrency);
  const BenchmarkSummary s = run_benchmark(cases, *rep, *client);
  if (!a.out.empty()) write_file_atomic(a.out, results_to_jsonl(s.results));
  emit(summary_to_json(s, *rep), a.summary);
  return kExitOk;
}

struct RenderArgs {
  std::string image, tree, elements, groups, style = "both", out;
  double width = 0, height = 0;
};

int run_render(const RenderArgs& a) {
  const auto style = overlay_style_from_string(a.style);
  if (!style) throw ValidationError("--style must be elements, groups or both");
  const Raster image = read_image(a.image);
  Raster out;
  if (!a.tree.empty()) {
    out = render_overlay(image, load_tree(a.tree), *style);
  } else {
    const ScreenSize dims{static_cast<double>(image.width()), static_cast<double>(image.height())};
    std::vector<BBox> el, gr;
    if (!a.elements.empty()) {
      for (const auto& d : load_detections(a.elements, dims)) el.push_back(d.bbox);
    }
    if (!a.groups.empty()) {
      for (const auto& g : load_groups(a.groups)) gr.push_back(g.bbox);
    }
    out = render_overlay(image, el, gr, *style);
  }
  write_png(a.out, out);
  return kExitOk;
}

struct StatsArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int run_stats(const StatsArgs& a) {
  std::vector<fs::path> files;
  for (const auto& in : a.inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      }
    } else {
      files.emplace_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<AXNode> trees;
  for (const auto& f : files) trees.push_back(load_tree(f));
  emit(corpus_stats_json(trees), a.out);
  return kExitOk;
}

struct ConvertArgs {
  std::string in, out, to = "canonical";
  double width = 0, height = 0;
};

int run_convert(const ConvertArgs& a) {
  const auto dims = dims_of(a.width, a.height);
  const auto dets = load_detections(a.in, dims);
  std::ostringstream os;
  if (a.to == "canonical") {
    write_detections(os, dets);
  } else if (a.to == "normalized") {
    if (!dims) throw ValidationError("--to normalized needs --width and --height");
    write_normalized_detections(os, dets, *dims);
  } else {
    throw ValidationError("--to must be canonical or normalized");
  }
  write_file_atomic(a.out, os.str());
  return kExitOk;
}

struct ValidateArgs {
  std::string kind;
  std::vector<std::string> files;
};

int run_validate(const ValidateArgs& a) {
  const auto kind = file_kind_from_string(a.kind);
  if (!kind) throw ValidationError("unknown --kind " + a.kind);
  std::size_t total = 0;
  for (const auto& f : a.files) {
    const auto findings = validate_file(f, *kind);
    total += findings.size();
    for (const auto& x : findings) {
      std::cout << f << ": " << x.location << ": " << x.message << '\n';
    }
  }
  if (total == 0) std::cout << "ok\n";
  return total ? kExitValidation : kExitOk;
}

}  // namespace
}  // namespace axsynth

int main(int argc, char** argv) {
  using namespace axsynth;
  CLI::App app{"Accessibility tree synthesis and evaluation"};
  app.require_subcommand(1);
  std::function<int()> action;

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build trees from a run manifest");
  c_build->add_option("manifest", build.manifest, "JSONL run manifest")->required();
  c_build->add_option("--groups", build.groups, "heuristic, model or union");
  c_build->add_option("--config", build.config, "Pipeline config JSON");
  c_build->add_option("--jobs", build.jobs, "Parallel images");
  c_build->callback([&] { action = [&] { return run_build(build); }; });

  EvalTreeArgs et;
  auto* c_et = app.add_subcommand("eval-tree", "Compare predicted and ground-truth trees");
  c_et->add_option("pred", et.pred);
  c_et->add_option("gt", et.gt);
  c_et->add_option("--pairs", et.pairs, "JSONL {image_id, pred_path, gt_path}");
  c_et->add_option("--match-iou", et.match_iou);
  c_et->add_option("--ged-budget", et.ged_budget, "Seconds per pair");
  c_et->add_flag("--ged-refine", et.ged_refine);
  c_et->add_option("--jobs", et.jobs);
  c_et->add_option("--out", et.out);
  c_et->add_option("--csv", et.csv);
  c_et->callback([&] { action = [&] { return run_eval_tree(et); }; });

  EvalDetArgs ed;
  auto* c_ed = app.add_subcommand("eval-det", "Detection metrics");
  c_ed->add_option("pred", ed.pred);
  c_ed->add_option("gt", ed.gt);
  c_ed->add_option("--pairs", ed.pairs, "JSONL {image_id, pred_path, gt_path}");
  c_ed->add_option("--width", ed.width);
  c_ed->add_option("--height", ed.height);
  c_ed->add_option("--iou-thresholds", ed.thresholds)->delimiter(',');
  c_ed->add_option("--out", ed.out);
  c_ed->add_option("--csv", ed.csv);
  c_ed->callback([&] { action = [&] { return run_eval_det(ed); }; });

  EvalCaptionArgs ec;
  auto* c_ec = app.add_subcommand("eval-caption", "CIDEr and judge accuracy");
  c_ec->add_option("candidates", ec.candidates)->required();
  c_ec->add_option("refs", ec.refs)->required();
  c_ec->add_flag("--judge", ec.judge);
  c_ec->add_option("--mock-client", ec.mock_client);
  c_ec->add_option("--concurrency", ec.concurrency);
  c_ec->add_option("--out", ec.out);
  c_ec->callback([&] { action = [&] { return run_eval_caption(ec); }; });

  BenchArgs ba;
  auto* c_ba = app.add_subcommand("bench-agent", "Grounding benchmark");
  c_ba->add_option("manifest", ba.manifest)->required();
  c_ba->add_option("--rep", ba.rep, "hier or flat");
  c_ba->add_option("--mock-client", ba.mock_client, "JSONL canned responses");
  c_ba->add_option("--concurrency", ba.concurrency);
  c_ba->add_option("--out", ba.out, "Results JSONL");
  c_ba->add_option("--summary", ba.summary, "Summary JSON");
  c_ba->callback([&] { action = [&] { return run_bench_agent(ba); }; });

  RenderArgs ra;
  auto* c_ra = app.add_subcommand("render", "Overlay boxes on a screenshot");
  c_ra->add_option("--image", ra.image)->required();
  c_ra->add_option("--tree", ra.tree);
  c_ra->add_option("--elements", ra.elements, "Detections file");
  c_ra->add_option("--groups", ra.groups, "Groups file");
  c_ra->add_option("--style", ra.style, "elements, groups or both");
  c_ra->add_option("--out", ra.out)->required();
  c_ra->callback([&] { action = [&] { return run_render(ra); }; });

  StatsArgs sa;
  auto* c_sa = app.add_subcommand("stats", "Tree corpus statistics");
  c_sa->add_option("inputs", sa.inputs, "Tree files or directories")->required();
  c_sa->add_option("--out", sa.out);
  c_sa->callback([&] { action = [&] { return run_stats(sa); }; });

  ConvertArgs ca;
  auto* c_ca = app.add_subcommand("convert", "Convert detection formats");
  c_ca->add_option("input", ca.in)->required();
  c_ca->add_option("output", ca.out)->required();
  c_ca->add_option("--to", ca.to, "canonical or normalized");
  c_ca->add_option("--width", ca.width);
  c_ca->add_option("--height", ca.height);
  c_ca->callback([&] { action = [&] { return run_convert(ca); }; });

  ValidateArgs va;
  auto* c_va = app.add_subcommand("validate", "Check files against a schema");
  c_va->add_option("--kind", va.kind, "tree, detections, ocr, captions, groups or tasks")->required();
  c_va->add_option("files", va.files)->required();
  c_va->callback([&] { action = [&] { return run_validate(va); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  try {
    return action();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
