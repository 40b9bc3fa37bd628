#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axsynth/ingest.h"
#include "axsynth/llm_client.h"
#include "axsynth/tree.h"

namespace axsynth {

enum class Representation { kHierarchical, kFlat };

std::string_view to_string(Representation rep);
// Accepts "hier", "hierarchical", "flat".
std::optional<Representation> representation_from_string(std::string_view s);

struct ElementRef {
  int id = 0;
  const AXNode* node = nullptr;
};

// Hierarchical: preorder over every node but the root. Flat: leaves other
// than the root, in (y, x) reading order. Ids run 1..n.
std::vector<ElementRef> enumerate_elements(const AXNode& tree, Representation rep);

// JSON array with one record per top-level element. Record keys: id, role,
// then name/description/value when present, bbox, and for the hierarchical
// form children.
std::string render_ax_json(const AXNode& tree, Representation rep);

std::string build_prompt(std::string_view ax_json, std::string_view action);

// "What is the ID of the element that must be clicked to perform the
// command: {command}?"
std::string build_task_action(std::string_view command);

enum class FailureKind { kNoParse, kOutOfRange, kMiss, kClientError };

std::string_view to_string(FailureKind kind);

struct IdParse {
  std::optional<int> id;
  std::optional<FailureKind> error;  // kNoParse or kOutOfRange
};

// First integer token of `response`, which must lie in 1..n.
IdParse parse_id(std::string_view response, int n);

struct TaskResult {
  std::string image_id;
  TaskRecord record;
  std::optional<int> chosen_id;
  std::optional<std::pair<double, double>> chosen_center;
  bool success = false;
  std::optional<FailureKind> failure_kind;
  std::string response;
};

struct BenchmarkCase {
  std::string image_id;
  TaskRecord record;
  const AXNode* tree = nullptr;
};

struct BenchmarkSummary {
  double success_rate = 0;
  std::size_t records = 0;
  std::size_t successes = 0;
  std::vector<TaskResult> results;  // input order
};

// Client errors mark the record failed and never abort the run. Up to
// client.max_concurrency() records are in flight.
BenchmarkSummary run_benchmark(std::span<const BenchmarkCase> cases,
                               Representation rep, ChatClient& client);

struct ManifestRow {
  std::string image_id;
  std::filesystem::path tree_path;  // resolved against the manifest dir
  TaskRecord record;
};

// JSONL rows {image_id, tree_path, x1, y1, x2, y2, image_width,
// image_height, command, visual_description}.
std::vector<ManifestRow> load_benchmark_manifest(const std::filesystem::path& path);

std::string task_result_to_json(const TaskResult& result);
std::string results_to_jsonl(std::span<const TaskResult> results);
std::string summary_to_json(const BenchmarkSummary& summary, Representation rep);

}  // namespace axsynth
