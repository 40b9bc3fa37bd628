#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axsynth/describe.h"
#include "axsynth/grouping.h"
#include "axsynth/hierarchy.h"
#include "axsynth/tree.h"

namespace axsynth {

enum class GroupMode { kHeuristic, kModel, kUnion };

std::string_view to_string(GroupMode mode);
std::optional<GroupMode> group_mode_from_string(std::string_view s);

struct PipelineConfig {
  GroupingConfig grouping;
  AssemblyConfig assembly;
  double text_containment = kDefaultTextContainment;

  void validate() const;
};

// {"grouping": {...}, "assembly": {...}, "describe": {"text_containment": x}}.
// Every field is optional; unknown keys raise ValidationError.
PipelineConfig parse_pipeline_config(std::string_view json_text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
std::string pipeline_config_to_json(const PipelineConfig& cfg);

struct RunManifest {
  std::string image_id;
  std::optional<std::filesystem::path> image_path;
  std::optional<std::filesystem::path> detections_path;
  std::optional<std::filesystem::path> ocr_path;
  std::optional<std::filesystem::path> captions_path;
  std::optional<std::filesystem::path> groups_path;
  std::filesystem::path output_tree_path;
  // Needed when there is no image to take the size from.
  std::optional<ScreenSize> window;
};

// JSONL, one manifest per line. Relative paths resolve against `base_dir`.
std::vector<RunManifest> parse_run_manifests(std::string_view text,
                                             const std::filesystem::path& base_dir);
std::vector<RunManifest> load_run_manifests(const std::filesystem::path& path);

// In-memory inputs of one build.
struct BuildInputs {
  std::string image_id;
  ScreenSize window;
  std::vector<Detection> detections;
  std::vector<OcrLine> ocr;
  std::vector<CaptionRecord> captions;
  std::vector<GroupBox> model_groups;
  const Raster* image = nullptr;
};

// OCR binding, caption fill-in, grouping and assembly. OCR lines not bound
// to any element become AXStaticText leaves.
AXNode build_tree(const BuildInputs& inputs, GroupMode mode,
                  const PipelineConfig& cfg);

// Loads the manifest's files and runs build_tree.
AXNode build_tree(const RunManifest& manifest, GroupMode mode,
                  const PipelineConfig& cfg);

// Element count and depth distributions over a tree corpus, as JSON.
std::string corpus_stats_json(std::span<const AXNode> trees);

}  // namespace axsynth
