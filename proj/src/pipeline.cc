#include "axsynth/pipeline.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "axsynth/errors.h"
#include "axsynth/io.h"
#include "axsynth/raster.h"
#include "json_util.h"

namespace axsynth {
namespace {

using detail::Json;

template <typename T>
void read_field(const Json& obj, const std::string& section, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw ValidationError(section + "." + key + ": expected boolean");
    out = it->template get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) {
      throw ValidationError(section + "." + key + ": expected integer");
    }
    out = it->template get<T>();
  } else {
    if (!it->is_number()) throw ValidationError(section + "." + key + ": expected number");
    out = it->template get<T>();
  }
}

void reject_unknown(const Json& obj, const std::string& section,
                    std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ValidationError(section + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return it.key() == k;
        }) == known.end()) {
      throw ValidationError(section + ": unknown key \"" + it.key() + "\"");
    }
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<std::filesystem::path> optional_path(const Json& j, const char* key,
                                                   const std::filesystem::path& base,
                                                   std::size_t line) {
  auto s = detail::optional_string(j, key, "manifest", line);
  if (!s) return std::nullopt;
  return resolve(base, *s);
}

}  // namespace

std::string_view to_string(GroupMode mode) {
  switch (mode) {
    case GroupMode::kHeuristic: return "heuristic";
    case GroupMode::kModel: return "model";
    case GroupMode::kUnion: return "union";
  }
  return "unknown";
}

std::optional<GroupMode> group_mode_from_string(std::string_view s) {
  if (s == "heuristic") return GroupMode::kHeuristic;
  if (s == "model") return GroupMode::kModel;
  if (s == "union") return GroupMode::kUnion;
  return std::nullopt;
}

void PipelineConfig::validate() const {
  grouping.validate();
  assembly.validate();
  if (!(text_containment > 0 && text_containment <= 1)) {
    throw ValidationError("describe.text_containment must lie in (0,1]");
  }
}

PipelineConfig parse_pipeline_config(std::string_view json_text) {
  Json j = Json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded()) throw ValidationError("config: malformed JSON");
  reject_unknown(j, "config", {"grouping", "assembly", "describe"});
  PipelineConfig cfg;
  if (j.contains("grouping")) {
    const Json& g = j["grouping"];
    reject_unknown(g, "grouping",
                   {"text_vertical_pad", "caption_x_overlap_min", "caption_vgap_frac",
                    "caption_y_overlap_min", "caption_hgap_frac", "column_gap_factor",
                    "column_edge_tol", "row_gap_factor", "row_edge_tol", "color_top_k",
                    "color_quant_bits", "opening_kernel", "min_region_frac",
                    "max_region_frac", "containment_threshold"});
    GroupingConfig& c = cfg.grouping;
    read_field(g, "grouping", "text_vertical_pad", c.text_vertical_pad);
    read_field(g, "grouping", "caption_x_overlap_min", c.caption_x_overlap_min);
    read_field(g, "grouping", "caption_vgap_frac", c.caption_vgap_frac);
    read_field(g, "grouping", "caption_y_overlap_min", c.caption_y_overlap_min);
    read_field(g, "grouping", "caption_hgap_frac", c.caption_hgap_frac);
    read_field(g, "grouping", "column_gap_factor", c.column_gap_factor);
    read_field(g, "grouping", "column_edge_tol", c.column_edge_tol);
    read_field(g, "grouping", "row_gap_factor", c.row_gap_factor);
    read_field(g, "grouping", "row_edge_tol", c.row_edge_tol);
    read_field(g, "grouping", "color_top_k", c.color_top_k);
    read_field(g, "grouping", "color_quant_bits", c.color_quant_bits);
    read_field(g, "grouping", "opening_kernel", c.opening_kernel);
    read_field(g, "grouping", "min_region_frac", c.min_region_frac);
    read_field(g, "grouping", "max_region_frac", c.max_region_frac);
    read_field(g, "grouping", "containment_threshold", c.containment_threshold);
  }
  if (j.contains("assembly")) {
    const Json& a = j["assembly"];
    reject_unknown(a, "assembly", {"merge_iou", "containment_threshold", "drop_empty_groups"});
    read_field(a, "assembly", "merge_iou", cfg.assembly.merge_iou);
    read_field(a, "assembly", "containment_threshold", cfg.assembly.containment_threshold);
    read_field(a, "assembly", "drop_empty_groups", cfg.assembly.drop_empty_groups);
  }
  if (j.contains("describe")) {
    const Json& d = j["describe"];
    reject_unknown(d, "describe", {"text_containment"});
    read_field(d, "describe", "text_containment", cfg.text_containment);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(read_file(path));
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  const GroupingConfig& c = cfg.grouping;
  Json g = Json::object();
  g["text_vertical_pad"] = c.text_vertical_pad;
  g["caption_x_overlap_min"] = c.caption_x_overlap_min;
  g["caption_vgap_frac"] = c.caption_vgap_frac;
  g["caption_y_overlap_min"] = c.caption_y_overlap_min;
  g["caption_hgap_frac"] = c.caption_hgap_frac;
  g["column_gap_factor"] = c.column_gap_factor;
  g["column_edge_tol"] = c.column_edge_tol;
  g["row_gap_factor"] = c.row_gap_factor;
  g["row_edge_tol"] = c.row_edge_tol;
  g["color_top_k"] = c.color_top_k;
  g["color_quant_bits"] = c.color_quant_bits;
  g["opening_kernel"] = c.opening_kernel;
  g["min_region_frac"] = c.min_region_frac;
  g["max_region_frac"] = c.max_region_frac;
  g["containment_threshold"] = c.containment_threshold;
  Json a = Json::object();
  a["merge_iou"] = cfg.assembly.merge_iou;
  a["containment_threshold"] = cfg.assembly.containment_threshold;
  a["drop_empty_groups"] = cfg.assembly.drop_empty_groups;
  Json d = Json::object();
  d["text_containment"] = cfg.text_containment;
  Json j = Json::object();
  j["grouping"] = std::move(g);
  j["assembly"] = std::move(a);
  j["describe"] = std::move(d);
  return j.dump(2);
}

std::vector<RunManifest> parse_run_manifests(std::string_view text,
                                             const std::filesystem::path& base_dir) {
  std::vector<RunManifest> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = detail::parse_json(line, line_no);
    if (!j.is_object()) throw ParseError("manifest row must be an object", line_no);
    RunManifest m;
    m.image_id = detail::required_string(j, "image_id", "manifest", line_no);
    m.image_path = optional_path(j, "image_path", base_dir, line_no);
    m.detections_path = optional_path(j, "detections_path", base_dir, line_no);
    m.ocr_path = optional_path(j, "ocr_path", base_dir, line_no);
    m.captions_path = optional_path(j, "captions_path", base_dir, line_no);
    m.groups_path = optional_path(j, "groups_path", base_dir, line_no);
    m.output_tree_path =
        resolve(base_dir, detail::required_string(j, "output_tree_path", "manifest", line_no));
    const bool has_w = j.contains("image_width") && !j["image_width"].is_null();
    const bool has_h = j.contains("image_height") && !j["image_height"].is_null();
    if (has_w != has_h) {
      throw ParseError("manifest: image_width and image_height go together", line_no);
    }
    if (has_w) {
      m.window = ScreenSize{detail::required_number(j, "image_width", "manifest", line_no),
                            detail::required_number(j, "image_height", "manifest", line_no)};
    }
    if (!m.detections_path) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": manifest lacks detections_path");
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<RunManifest> load_run_manifests(const std::filesystem::path& path) {
  return parse_run_manifests(read_file(path), path.parent_path());
}

AXNode build_tree(const BuildInputs& in, GroupMode mode, const PipelineConfig& cfg) {
  cfg.validate();
  const TextBinding binding = bind_text_detailed(in.detections, in.ocr, cfg.text_containment);
  std::vector<DescribedElement> elements =
      assign_descriptions(binding.elements, in.captions, in.image_id);

  std::vector<TextBox> texts;
  std::vector<DescribedElement> text_leaves;
  for (std::size_t i = 0; i < in.ocr.size(); ++i) {
    if (binding.line_bound[i]) continue;
    texts.push_back({in.ocr[i].bbox, in.ocr[i].text});
    DescribedElement e;
    e.detection = Detection{in.ocr[i].bbox, SimplifiedRole::kStaticText, in.ocr[i].confidence};
    e.description = in.ocr[i].text;
    e.source = DescriptionSource::kOcr;
    text_leaves.push_back(std::move(e));
  }

  std::vector<GroupBox> groups;
  if (mode != GroupMode::kModel) {
    groups = heuristic_groups(elements, texts, in.image, in.window, cfg.grouping);
  }
  if (mode != GroupMode::kHeuristic) {
    groups.insert(groups.end(), in.model_groups.begin(), in.model_groups.end());
  }
  elements.insert(elements.end(), text_leaves.begin(), text_leaves.end());
  return assemble(in.window, elements, groups, cfg.assembly);
}

AXNode build_tree(const RunManifest& m, GroupMode mode, const PipelineConfig& cfg) {
  BuildInputs in;
  in.image_id = m.image_id;
  std::optional<Raster> image;
  if (m.image_path) image = read_image(*m.image_path);
  if (m.window) {
    in.window = *m.window;
  } else if (image) {
    in.window = ScreenSize{static_cast<double>(image->width()),
                           static_cast<double>(image->height())};
  } else {
    throw ValidationError(m.image_id + ": window size unknown (no image, no image_width)");
  }
  if (!m.detections_path) throw ValidationError(m.image_id + ": no detections_path");
  in.detections = load_detections(*m.detections_path, in.window);
  if (m.ocr_path) in.ocr = load_ocr(*m.ocr_path);
  if (m.captions_path) in.captions = load_captions(*m.captions_path);
  if (mode != GroupMode::kHeuristic) {
    if (!m.groups_path) {
      throw ValidationError(m.image_id + ": group mode " + std::string(to_string(mode)) +
                            " needs groups_path");
    }
    in.model_groups = load_groups(*m.groups_path);
  }
  in.image = image ? &*image : nullptr;
  return build_tree(in, mode, cfg);
}

std::string corpus_stats_json(std::span<const AXNode> trees) {
  std::vector<double> elements, depths, groups, nodes;
  std::map<std::size_t, std::size_t> depth_hist;
  for (const AXNode& t : trees) {
    const TreeStats s = tree_stats(t);
    elements.push_back(static_cast<double>(s.element_count));
    depths.push_back(static_cast<double>(s.max_depth));
    groups.push_back(static_cast<double>(s.group_count));
    nodes.push_back(static_cast<double>(s.node_count));
    depth_hist[s.max_depth]++;
  }
  auto summarize = [](std::vector<double> v) {
    Json j = Json::object();
    if (v.empty()) {
      j["mean"] = Json();
      j["median"] = Json();
      j["min"] = Json();
      j["max"] = Json();
      return j;
    }
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (double x : v) sum += x;
    const std::size_t n = v.size();
    const double median = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
    j["mean"] = detail::number_to_json(sum / static_cast<double>(n));
    j["median"] = detail::number_to_json(median);
    j["min"] = detail::number_to_json(v.front());
    j["max"] = detail::number_to_json(v.back());
    return j;
  };
  Json j = Json::object();
  j["trees"] = trees.size();
  j["elements"] = summarize(elements);
  j["nodes"] = summarize(nodes);
  j["groups"] = summarize(groups);
  j["max_depth"] = summarize(depths);
  Json hist = Json::object();
  for (auto [d, c] : depth_hist) hist[std::to_string(d)] = c;
  j["depth_histogram"] = std::move(hist);
  return j.dump(2);
}

}  // namespace axsynth
