#include "axsynth/ingest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "axsynth/errors.h"
#include "axsynth/io.h"
#include "axsynth/tree.h"
#include "json_util.h"

namespace axsynth {
namespace {

using detail::Json;

constexpr std::string_view kTaskFields[] = {
    "x1", "y1", "x2", "y2", "image_width", "image_height", "command",
    "visual_description"};

std::string line_where(std::size_t line) {
  return "line " + std::to_string(line);
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Calls fn(text, line_no) for each non-blank line.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    fn(line, line_no);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

Json parse_object_line(const std::string& text, std::size_t line) {
  Json j = detail::parse_json(text, line);
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  return j;
}

double parse_confidence(const Json& j, std::size_t line) {
  const double c = detail::required_number(j, "confidence", "record", line);
  if (!(c >= 0.0 && c <= 1.0)) {
    throw ValidationError(line_where(line) + ": confidence " +
                          Json(c).dump() + " outside [0,1]");
  }
  return c;
}

SimplifiedRole parse_detector_class(const std::string& name, std::size_t line) {
  auto cls = simplified_role_from_string(name);
  if (!cls || !is_detector_class(*cls)) {
    throw ValidationError(line_where(line) + ": unknown detector class \"" +
                          name + "\"");
  }
  return *cls;
}

Detection detection_from_json(const Json& j, std::size_t line) {
  Detection d;
  d.bbox = detail::bbox_from_json(detail::required(j, "bbox", "record", line),
                                  "bbox", line);
  d.cls = parse_detector_class(
      detail::required_string(j, "class", "record", line), line);
  d.confidence = parse_confidence(j, line);
  return d;
}

Detection detection_from_normalized(const std::string& text, std::size_t line,
                                    std::optional<ScreenSize> dims) {
  std::istringstream ss(text);
  std::string id_token;
  double cx, cy, w, h;
  if (!(ss >> id_token >> cx >> cy >> w >> h)) {
    throw ParseError("expected \"class_id cx cy w h [confidence]\"", line);
  }
  double conf = 1.0;
  if (!(ss >> conf)) conf = 1.0;
  std::string rest;
  if (ss.clear(), ss >> rest) {
    throw ParseError("trailing tokens in normalized record", line);
  }
  std::size_t used = 0;
  int id = -1;
  try {
    id = std::stoi(id_token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  const auto classes = detector_classes();
  if (used != id_token.size() || id < 0 ||
      id >= static_cast<int>(classes.size())) {
    throw ValidationError(line_where(line) + ": unknown class id " + id_token);
  }
  for (double v : {cx, cy, w, h}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(line_where(line) +
                            ": normalized coordinate outside [0,1]");
    }
  }
  if (!(conf >= 0.0 && conf <= 1.0)) {
    throw ValidationError(line_where(line) + ": confidence outside [0,1]");
  }
  if (!dims) {
    throw ValidationError(line_where(line) +
                          ": normalized record needs image dimensions");
  }
  Detection d;
  d.cls = classes[static_cast<std::size_t>(id)];
  d.confidence = conf;
  d.bbox = {std::round((cx - w / 2) * dims->width),
            std::round((cy - h / 2) * dims->height),
            std::round(w * dims->width), std::round(h * dims->height)};
  return d;
}

bool starts_with_brace(std::istream& in) {
  in >> std::ws;
  return in.peek() == '{';
}

OcrLine ocr_from_json(const Json& j, std::size_t line) {
  OcrLine o;
  o.text = detail::required_string(j, "text", "record", line);
  if (o.text.empty()) {
    throw ValidationError(line_where(line) + ": empty text field");
  }
  o.bbox = detail::bbox_from_json(detail::required(j, "bbox", "record", line),
                                  "bbox", line);
  o.confidence = parse_confidence(j, line);
  return o;
}

GroupBox group_from_json(const Json& j, std::size_t line) {
  GroupBox g;
  g.bbox = detail::bbox_from_json(detail::required(j, "bbox", "record", line),
                                  "bbox", line);
  g.confidence = parse_confidence(j, line);
  const std::string src = detail::required_string(j, "source", "record", line);
  auto parsed = group_source_from_string(src);
  if (!parsed) {
    throw ValidationError(line_where(line) + ": unknown group source \"" +
                          src + "\"");
  }
  g.source = *parsed;
  return g;
}

CaptionRecord caption_from_json(const Json& j, std::size_t line) {
  CaptionRecord c;
  c.element_key = detail::required_string(j, "element_key", "record", line);
  c.caption = detail::required_string(j, "caption", "record", line);
  if (c.element_key.empty()) {
    throw ValidationError(line_where(line) + ": empty element_key");
  }
  return c;
}

// RFC 4180 style: quoted fields may hold commas, doubled quotes and line
// breaks. Returns rows paired with their starting line number.
std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv(
    std::istream& in) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    bool empty = row.size() == 1 && row[0].empty();
    if (!empty) rows.emplace_back(row_line, std::move(row));
    row.clear();
  };
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw ParseError("stray quote inside unquoted field", line);
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line);
  if (field_started || !row.empty()) end_row();
  return rows;
}

double parse_csv_number(const std::string& s, std::string_view name,
                        std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw ParseError("field " + std::string(name) + ": expected number, got \"" +
                         s + "\"",
                     line);
  }
  return v;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double v) { return detail::number_to_json(v).dump(); }

// Parses all task rows, reporting every bad row through `on_error` when it is
// set, otherwise throwing on the first one.
template <typename OnError>
std::vector<TaskRecord> read_tasks_impl(std::istream& in, OnError&& on_error) {
  std::vector<TaskRecord> out;
  if (starts_with_brace(in)) {
    for_each_line(in, [&](const std::string& text, std::size_t line) {
      try {
        out.push_back(task_record_from_json_text(text, line));
      } catch (const Error& e) {
        on_error(line, e);
      }
    });
    return out;
  }
  auto rows = parse_csv(in);
  if (rows.empty()) return out;
  const auto& header = rows.front().second;
  std::size_t index[8];
  for (std::size_t f = 0; f < 8; ++f) {
    auto it = std::find(header.begin(), header.end(), kTaskFields[f]);
    if (it == header.end()) {
      throw ParseError("CSV header lacks field " + std::string(kTaskFields[f]),
                       rows.front().first);
    }
    index[f] = static_cast<std::size_t>(it - header.begin());
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, cells] = rows[r];
    try {
      if (cells.size() != header.size()) {
        throw ParseError("expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(cells.size()),
                         line);
      }
      TaskRecord t;
      double* nums[] = {&t.x1, &t.y1, &t.x2, &t.y2, &t.image_width,
                        &t.image_height};
      for (std::size_t f = 0; f < 6; ++f) {
        *nums[f] = parse_csv_number(cells[index[f]], kTaskFields[f], line);
      }
      t.command = cells[index[6]];
      t.visual_description = cells[index[7]];
      try {
        t.validate();
      } catch (const ValidationError& e) {
        throw ValidationError(line_where(line) + ": " + e.what());
      }
      out.push_back(std::move(t));
    } catch (const Error& e) {
      on_error(line, e);
    }
  }
  return out;
}

template <typename Parse>
auto read_jsonl(std::istream& in, Parse&& parse) {
  std::vector<decltype(parse(Json(), std::size_t{}))> out;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    out.push_back(parse(parse_object_line(text, line), line));
  });
  return out;
}

template <typename Parse>
void validate_jsonl(std::istream& in, Parse&& parse,
                    std::vector<Finding>& findings) {
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    try {
      parse(parse_object_line(text, line), line);
    } catch (const Error& e) {
      findings.push_back({line_where(line), e.what()});
    }
  });
}

}  // namespace

std::string_view to_string(GroupSource source) {
  switch (source) {
    case GroupSource::kModel:
      return "model";
    case GroupSource::kText:
      return "text";
    case GroupSource::kCaption:
      return "caption";
    case GroupSource::kColumn:
      return "column";
    case GroupSource::kRow:
      return "row";
    case GroupSource::kColor:
      return "color";
  }
  return "model";
}

std::optional<GroupSource> group_source_from_string(std::string_view name) {
  for (GroupSource s : {GroupSource::kModel, GroupSource::kText,
                        GroupSource::kCaption, GroupSource::kColumn,
                        GroupSource::kRow, GroupSource::kColor}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

void TaskRecord::validate() const {
  for (double v : {x1, y1, x2, y2, image_width, image_height}) {
    if (!std::isfinite(v)) throw ValidationError("non-finite coordinate");
  }
  if (x1 < 0 || y1 < 0 || x2 > image_width || y2 > image_height) {
    throw ValidationError("coordinate outside image");
  }
  if (!(x1 < x2)) throw ValidationError("x2 must exceed x1");
  if (!(y1 < y2)) throw ValidationError("y2 must exceed y1");
}

std::string element_key(std::string_view image_id, const BBox& b) {
  auto r = [](double v) {
    return std::to_string(static_cast<long long>(std::llround(v)));
  };
  return std::string(image_id) + ":" + r(b.x) + "," + r(b.y) + "," + r(b.w) +
         "," + r(b.h);
}

std::vector<Detection> read_detections(std::istream& in,
                                       std::optional<ScreenSize> dims) {
  std::vector<Detection> out;
  const bool jsonl = starts_with_brace(in);
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    out.push_back(jsonl ? detection_from_json(parse_object_line(text, line), line)
                        : detection_from_normalized(text, line, dims));
  });
  return out;
}

std::vector<Detection> load_detections(const std::filesystem::path& path,
                                       std::optional<ScreenSize> dims) {
  auto in = open_input(path);
  return read_detections(in, dims);
}

void write_detections(std::ostream& out, std::span<const Detection> dets) {
  for (const Detection& d : dets) {
    Json j = Json::object();
    j["bbox"] = detail::bbox_to_json(d.bbox);
    j["class"] = std::string(to_string(d.cls));
    j["confidence"] = detail::number_to_json(d.confidence);
    out << j.dump() << '\n';
  }
}

int detector_class_id(SimplifiedRole cls) {
  const auto classes = detector_classes();
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == cls) return static_cast<int>(i);
  }
  throw ValidationError("not a detector class: " + std::string(to_string(cls)));
}

void write_normalized_detections(std::ostream& out,
                                 std::span<const Detection> dets,
                                 ScreenSize dims) {
  if (dims.width <= 0 || dims.height <= 0) {
    throw ValidationError("image dimensions must be positive");
  }
  char buf[160];
  for (const Detection& d : dets) {
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f %.6f\n",
                  detector_class_id(d.cls), d.bbox.center_x() / dims.width,
                  d.bbox.center_y() / dims.height, d.bbox.w / dims.width,
                  d.bbox.h / dims.height, d.confidence);
    out << buf;
  }
}

std::vector<OcrLine> read_ocr(std::istream& in) {
  return read_jsonl(in, ocr_from_json);
}

std::vector<OcrLine> load_ocr(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_ocr(in);
}

void write_ocr(std::ostream& out, std::span<const OcrLine> lines) {
  for (const OcrLine& o : lines) {
    Json j = Json::object();
    j["text"] = o.text;
    j["bbox"] = detail::bbox_to_json(o.bbox);
    j["confidence"] = detail::number_to_json(o.confidence);
    out << j.dump() << '\n';
  }
}

std::vector<GroupBox> read_groups(std::istream& in) {
  return read_jsonl(in, group_from_json);
}

std::vector<GroupBox> load_groups(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_groups(in);
}

void write_groups(std::ostream& out, std::span<const GroupBox> groups) {
  for (const GroupBox& g : groups) {
    Json j = Json::object();
    j["bbox"] = detail::bbox_to_json(g.bbox);
    j["confidence"] = detail::number_to_json(g.confidence);
    j["source"] = std::string(to_string(g.source));
    out << j.dump() << '\n';
  }
}

std::vector<CaptionRecord> read_captions(std::istream& in) {
  std::vector<CaptionRecord> out;
  std::set<std::string> seen;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    CaptionRecord c = caption_from_json(parse_object_line(text, line), line);
    if (!seen.insert(c.element_key).second) {
      throw ValidationError(line_where(line) + ": duplicate element_key \"" +
                            c.element_key + "\"");
    }
    out.push_back(std::move(c));
  });
  return out;
}

std::vector<CaptionRecord> read_reference_captions(std::istream& in) {
  return read_jsonl(in, caption_from_json);
}

std::vector<CaptionRecord> load_captions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_captions(in);
}

void write_captions(std::ostream& out, std::span<const CaptionRecord> caps) {
  for (const CaptionRecord& c : caps) {
    Json j = Json::object();
    j["element_key"] = c.element_key;
    j["caption"] = c.caption;
    out << j.dump() << '\n';
  }
}

TaskRecord task_record_from_json_text(const std::string& text,
                                      std::size_t line) {
  Json j = parse_object_line(text, line);
  TaskRecord t;
  double* nums[] = {&t.x1, &t.y1, &t.x2, &t.y2, &t.image_width,
                    &t.image_height};
  for (std::size_t f = 0; f < 6; ++f) {
    *nums[f] = detail::required_number(j, std::string(kTaskFields[f]).c_str(),
                                       "record", line);
  }
  t.command = detail::required_string(j, "command", "record", line);
  t.visual_description =
      detail::required_string(j, "visual_description", "record", line);
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(line_where(line) + ": " + e.what());
  }
  return t;
}

std::vector<TaskRecord> read_task_records(std::istream& in) {
  // Invoked from inside the catch handler, so a bare rethrow keeps the type.
  return read_tasks_impl(in, [](std::size_t, const Error&) { throw; });
}

std::vector<TaskRecord> load_task_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_task_records(in);
}

void write_task_records(std::ostream& out, std::span<const TaskRecord> recs) {
  for (std::size_t f = 0; f < 8; ++f) {
    out << (f ? "," : "") << kTaskFields[f];
  }
  out << '\n';
  for (const TaskRecord& t : recs) {
    out << format_number(t.x1) << ',' << format_number(t.y1) << ','
        << format_number(t.x2) << ',' << format_number(t.y2) << ','
        << format_number(t.image_width) << ','
        << format_number(t.image_height) << ',' << csv_escape(t.command) << ','
        << csv_escape(t.visual_description) << '\n';
  }
}

std::optional<FileKind> file_kind_from_string(std::string_view name) {
  for (FileKind k : {FileKind::kTree, FileKind::kDetections, FileKind::kOcr,
                     FileKind::kCaptions, FileKind::kGroups, FileKind::kTasks}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(FileKind kind) {
  switch (kind) {
    case FileKind::kTree:
      return "tree";
    case FileKind::kDetections:
      return "detections";
    case FileKind::kOcr:
      return "ocr";
    case FileKind::kCaptions:
      return "captions";
    case FileKind::kGroups:
      return "groups";
    case FileKind::kTasks:
      return "tasks";
  }
  return "tree";
}

std::vector<Finding> validate_text(std::string_view content, FileKind kind) {
  std::vector<Finding> findings;
  std::istringstream in{std::string(content)};
  switch (kind) {
    case FileKind::kTree:
      try {
        parse_tree(content);
      } catch (const Error& e) {
        findings.push_back({"$", e.what()});
      }
      break;
    case FileKind::kDetections:
      if (starts_with_brace(in)) {
        validate_jsonl(in, detection_from_json, findings);
      } else {
        // Syntax and range checks only; pixel conversion needs real dims.
        for_each_line(in, [&](const std::string& text, std::size_t line) {
          try {
            detection_from_normalized(text, line, ScreenSize{1, 1});
          } catch (const Error& e) {
            findings.push_back({line_where(line), e.what()});
          }
        });
      }
      break;
    case FileKind::kOcr:
      validate_jsonl(in, ocr_from_json, findings);
      break;
    case FileKind::kGroups:
      validate_jsonl(in, group_from_json, findings);
      break;
    case FileKind::kCaptions: {
      std::set<std::string> seen;
      validate_jsonl(
          in,
          [&](const Json& j, std::size_t line) {
            CaptionRecord c = caption_from_json(j, line);
            if (!seen.insert(c.element_key).second) {
              throw ValidationError(line_where(line) +
                                    ": duplicate element_key \"" +
                                    c.element_key + "\"");
            }
            return c;
          },
          findings);
      break;
    }
    case FileKind::kTasks:
      try {
        read_tasks_impl(in, [&](std::size_t line, const Error& e) {
          findings.push_back({line_where(line), e.what()});
        });
      } catch (const Error& e) {
        findings.push_back({"header", e.what()});
      }
      break;
  }
  return findings;
}

std::vector<Finding> validate_file(const std::filesystem::path& path,
                                   FileKind kind) {
  return validate_text(read_file(path), kind);
}

}  // namespace axsynth
