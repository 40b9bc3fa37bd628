#include "axsynth/agent.h"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "axsynth/errors.h"
#include "axsynth/io.h"
#include "json_util.h"
#include "parallel.h"
#include "text_util.h"

namespace axsynth {
namespace {

using detail::Json;

void collect_preorder(const AXNode& n, std::vector<const AXNode*>& out) {
  out.push_back(&n);
  for (const AXNode& c : n.children) collect_preorder(c, out);
}

void collect_leaves(const AXNode& n, std::vector<const AXNode*>& out) {
  if (n.is_leaf()) {
    out.push_back(&n);
    return;
  }
  for (const AXNode& c : n.children) collect_leaves(c, out);
}

Json record_json(const AXNode& n, int id) {
  Json j = Json::object();
  j["id"] = id;
  j["role"] = std::string(to_string(n.role));
  if (n.name) j["name"] = *n.name;
  if (n.description) j["description"] = *n.description;
  if (n.value) j["value"] = *n.value;
  j["bbox"] = detail::bbox_to_json(n.bbox);
  return j;
}

Json render_hier(const AXNode& n, int& next_id) {
  Json j = record_json(n, next_id++);
  Json kids = Json::array();
  for (const AXNode& c : n.children) kids.push_back(render_hier(c, next_id));
  j["children"] = std::move(kids);
  return j;
}

}  // namespace

std::string_view to_string(Representation rep) {
  return rep == Representation::kHierarchical ? "hierarchical" : "flat";
}

std::optional<Representation> representation_from_string(std::string_view s) {
  if (s == "hier" || s == "hierarchical") return Representation::kHierarchical;
  if (s == "flat") return Representation::kFlat;
  return std::nullopt;
}

std::vector<ElementRef> enumerate_elements(const AXNode& tree, Representation rep) {
  std::vector<const AXNode*> nodes;
  if (rep == Representation::kHierarchical) {
    for (const AXNode& c : tree.children) collect_preorder(c, nodes);
  } else {
    for (const AXNode& c : tree.children) collect_leaves(c, nodes);
    std::stable_sort(nodes.begin(), nodes.end(), [](const AXNode* a, const AXNode* b) {
      return std::tie(a->bbox.y, a->bbox.x) < std::tie(b->bbox.y, b->bbox.x);
    });
  }
  std::vector<ElementRef> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.push_back({static_cast<int>(i) + 1, nodes[i]});
  }
  return out;
}

std::string render_ax_json(const AXNode& tree, Representation rep) {
  Json arr = Json::array();
  if (rep == Representation::kHierarchical) {
    int next_id = 1;
    for (const AXNode& c : tree.children) arr.push_back(render_hier(c, next_id));
  } else {
    for (const ElementRef& e : enumerate_elements(tree, rep)) {
      arr.push_back(record_json(*e.node, e.id));
    }
  }
  return arr.dump();
}

std::string build_prompt(std::string_view ax_json, std::string_view action) {
  std::string out =
      "You are given a list of UI elements in JSON format, each with a unique "
      "numeric ID and accessibility attributes.\n"
      "Your task is to determine which UI element should be clicked to "
      "perform a specific action.\n"
      "Return only the numeric ID of the element that corresponds to the "
      "action.\n"
      "Do not explain or output anything else.\n"
      "Accessibility JSON: ";
  out += ax_json;
  out += "\nAction: ";
  out += action;
  out += "\nWhich element should be clicked?";
  return out;
}

std::string build_task_action(std::string_view command) {
  std::string out = "What is the ID of the element that must be clicked to perform the command: ";
  out += command;
  out += "?";
  return out;
}

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNoParse: return "no_parse";
    case FailureKind::kOutOfRange: return "out_of_range";
    case FailureKind::kMiss: return "miss";
    case FailureKind::kClientError: return "client_error";
  }
  return "unknown";
}

IdParse parse_id(std::string_view response, int n) {
  const auto v = detail::first_integer(response);
  if (!v) return {std::nullopt, FailureKind::kNoParse};
  if (*v < 1 || *v > n) return {std::nullopt, FailureKind::kOutOfRange};
  return {static_cast<int>(*v), std::nullopt};
}

BenchmarkSummary run_benchmark(std::span<const BenchmarkCase> cases,
                               Representation rep, ChatClient& client) {
  BenchmarkSummary summary;
  summary.results.resize(cases.size());
  detail::parallel_for(cases.size(), client.max_concurrency(), [&](std::size_t i) {
    const BenchmarkCase& c = cases[i];
    if (!c.tree) throw ValidationError("benchmark case without a tree: " + c.image_id);
    TaskResult& r = summary.results[i];
    r.image_id = c.image_id;
    r.record = c.record;
    const auto elements = enumerate_elements(*c.tree, rep);
    const std::string prompt =
        build_prompt(render_ax_json(*c.tree, rep), build_task_action(c.record.command));
    try {
      r.response = client.complete(prompt);
    } catch (const ClientError&) {
      r.failure_kind = FailureKind::kClientError;
      return;
    }
    const IdParse parsed = parse_id(r.response, static_cast<int>(elements.size()));
    if (!parsed.id) {
      r.failure_kind = parsed.error;
      return;
    }
    r.chosen_id = parsed.id;
    const BBox& b = elements[*parsed.id - 1].node->bbox;
    r.chosen_center = std::make_pair(b.center_x(), b.center_y());
    r.success = c.record.bbox().contains_point(b.center_x(), b.center_y());
    if (!r.success) r.failure_kind = FailureKind::kMiss;
  });
  summary.records = cases.size();
  for (const auto& r : summary.results) summary.successes += r.success;
  summary.success_rate = cases.empty() ? 0.0
                                       : static_cast<double>(summary.successes) /
                                             static_cast<double>(cases.size());
  return summary;
}

std::vector<ManifestRow> load_benchmark_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto base = path.parent_path();
  std::vector<ManifestRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = detail::parse_json(line, line_no);
    if (!j.is_object()) throw ParseError("manifest row must be an object", line_no);
    ManifestRow row;
    row.image_id = detail::required_string(j, "image_id", "row", line_no);
    std::filesystem::path tree = detail::required_string(j, "tree_path", "row", line_no);
    row.tree_path = tree.is_absolute() ? tree : base / tree;
    row.record = task_record_from_json_text(line, line_no);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string task_result_to_json(const TaskResult& r) {
  Json j = Json::object();
  j["image_id"] = r.image_id;
  Json rec = Json::object();
  rec["x1"] = detail::number_to_json(r.record.x1);
  rec["y1"] = detail::number_to_json(r.record.y1);
  rec["x2"] = detail::number_to_json(r.record.x2);
  rec["y2"] = detail::number_to_json(r.record.y2);
  rec["image_width"] = detail::number_to_json(r.record.image_width);
  rec["image_height"] = detail::number_to_json(r.record.image_height);
  rec["command"] = r.record.command;
  rec["visual_description"] = r.record.visual_description;
  j["record"] = std::move(rec);
  j["chosen_id"] = r.chosen_id ? Json(*r.chosen_id) : Json();
  if (r.chosen_center) {
    j["chosen_center"] = Json::array({detail::number_to_json(r.chosen_center->first),
                                      detail::number_to_json(r.chosen_center->second)});
  } else {
    j["chosen_center"] = Json();
  }
  j["success"] = r.success;
  j["failure_kind"] =
      r.failure_kind ? Json(std::string(to_string(*r.failure_kind))) : Json();
  j["response"] = r.response;
  return j.dump();
}

std::string results_to_jsonl(std::span<const TaskResult> results) {
  std::string out;
  for (const auto& r : results) {
    out += task_result_to_json(r);
    out += '\n';
  }
  return out;
}

std::string summary_to_json(const BenchmarkSummary& s, Representation rep) {
  Json j = Json::object();
  j["representation"] = std::string(to_string(rep));
  j["records"] = s.records;
  j["successes"] = s.successes;
  j["success_rate"] = s.success_rate;
  Json kinds = Json::object();
  for (FailureKind k : {FailureKind::kNoParse, FailureKind::kOutOfRange,
                        FailureKind::kMiss, FailureKind::kClientError}) {
    std::size_t n = 0;
    for (const auto& r : s.results) n += r.failure_kind == k;
    kinds[std::string(to_string(k))] = n;
  }
  j["failures"] = std::move(kinds);
  return j.dump(2);
}

}  // namespace axsynth
