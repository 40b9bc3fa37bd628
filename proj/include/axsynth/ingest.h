#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axsynth/geometry.h"
#include "axsynth/role.h"

namespace axsynth {

// One detector output. `cls` is one of the five detector classes.
struct Detection {
  BBox bbox;
  SimplifiedRole cls = SimplifiedRole::kButton;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct OcrLine {
  std::string text;
  BBox bbox;
  double confidence = 1.0;

  friend bool operator==(const OcrLine&, const OcrLine&) = default;
};

enum class GroupSource { kModel, kText, kCaption, kColumn, kRow, kColor };

std::string_view to_string(GroupSource source);
std::optional<GroupSource> group_source_from_string(std::string_view name);

struct GroupBox {
  BBox bbox;
  double confidence = 1.0;
  GroupSource source = GroupSource::kModel;

  friend bool operator==(const GroupBox&, const GroupBox&) = default;
};

struct CaptionRecord {
  std::string element_key;
  std::string caption;

  friend bool operator==(const CaptionRecord&, const CaptionRecord&) = default;
};

// One grounding benchmark row. Corners are in pixels of the screenshot.
struct TaskRecord {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  double image_width = 0, image_height = 0;
  std::string command;
  std::string visual_description;

  BBox bbox() const { return {x1, y1, x2 - x1, y2 - y1}; }

  // Throws ValidationError unless 0 <= x1 < x2 <= width and likewise for y.
  void validate() const;

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

// Join key between detector and captioner output: "imageId:x,y,w,h" with
// coordinates rounded to integer pixels.
std::string element_key(std::string_view image_id, const BBox& bbox);

// Detections are canonical JSONL or center-normalized text records
// ("class_id cx cy w h [confidence]"); the format is sniffed from the first
// non-blank character. Normalized records need `dims`.
std::vector<Detection> read_detections(
    std::istream& in, std::optional<ScreenSize> dims = std::nullopt);
std::vector<Detection> load_detections(
    const std::filesystem::path& path,
    std::optional<ScreenSize> dims = std::nullopt);
void write_detections(std::ostream& out, std::span<const Detection> dets);
void write_normalized_detections(std::ostream& out,
                                 std::span<const Detection> dets,
                                 ScreenSize dims);
// Class id of a detector class in normalized records.
int detector_class_id(SimplifiedRole cls);

std::vector<OcrLine> read_ocr(std::istream& in);
std::vector<OcrLine> load_ocr(const std::filesystem::path& path);
void write_ocr(std::ostream& out, std::span<const OcrLine> lines);

std::vector<GroupBox> read_groups(std::istream& in);
std::vector<GroupBox> load_groups(const std::filesystem::path& path);
void write_groups(std::ostream& out, std::span<const GroupBox> groups);

// Throws ValidationError on a duplicate element_key.
std::vector<CaptionRecord> read_captions(std::istream& in);
std::vector<CaptionRecord> load_captions(const std::filesystem::path& path);
void write_captions(std::ostream& out, std::span<const CaptionRecord> caps);

// Reference captions may repeat a key (several references per element).
std::vector<CaptionRecord> read_reference_captions(std::istream& in);

// CSV with a header naming the eight fields, or JSONL carrying them.
std::vector<TaskRecord> read_task_records(std::istream& in);
std::vector<TaskRecord> load_task_records(const std::filesystem::path& path);
void write_task_records(std::ostream& out, std::span<const TaskRecord> recs);

TaskRecord task_record_from_json_text(const std::string& line,
                                      std::size_t line_no = 0);

enum class FileKind { kTree, kDetections, kOcr, kCaptions, kGroups, kTasks };

std::optional<FileKind> file_kind_from_string(std::string_view name);
std::string_view to_string(FileKind kind);

struct Finding {
  std::string location;  // "line N" or a JSON path
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

// An empty report means the content is valid for `kind`.
std::vector<Finding> validate_text(std::string_view content, FileKind kind);

// Throws Error when the file cannot be read.
std::vector<Finding> validate_file(const std::filesystem::path& path,
                                   FileKind kind);

}  // namespace axsynth
