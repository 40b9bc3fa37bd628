// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "axsynth/hierarchy.h"
#include "axsynth/io.h"
#include "axsynth/metrics/caption.h"
#include "axsynth/metrics/detection.h"
#include "axsynth/metrics/tree_metrics.h"
#include "axsynth/tree.h"
#include "json.hpp"
#include "support/detection_fixture.h"
#include "support/fixtures.h"
#include "support/ged_bruteforce.h"
#include "support/grouping_boundary.h"
#include "support/random_trees.h"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace axsynth {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what;
      pass = false;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Random group/leaf trees with boxes nested inside their parents.
AXNode nested_tree(std::mt19937& rng, int depth, BBox box, int& budget) {
  AXNode n;
  n.bbox = box;
  n.role = Role::kGroup;
  std::uniform_int_distribution<int> kids(1, 4);
  const int k = depth > 0 ? kids(rng) : 0;
  if (k == 0 || budget <= 0) {
    static const Role kLeaves[] = {Role::kButton, Role::kStaticText, Role::kImage,
                                   Role::kLink, Role::kTextField};
    n.role = kLeaves[rng() % 5];
    n.description = "item " + std::to_string(budget);
    return n;
  }
  const double w = box.w / k;
  for (int i = 0; i < k && budget > 0; ++i) {
    --budget;
    n.children.push_back(nested_tree(rng, depth - 1,
                                     {box.x + i * w + 1, box.y + 1, std::max(1.0, w - 2),
                                      std::max(1.0, box.h - 2)},
                                     budget));
  }
  return n;
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Library call on every tree, then one `eval-tree --pairs` run over the same
// corpus written to disk.
Outcome self_comparison(const std::string& cli, const fs::path& work) {
  Outcome o;
  const auto t0 = Clock::now();
  std::vector<AXNode> corpus{parse_tree(testing::read_fixture("listing1.json"))};
  std::mt19937 rng(2024);
  for (int i = 0; i < 24; ++i) {
    int budget = 10 + 3 * i;
    AXNode root = nested_tree(rng, 4, {0, 0, 1440, 900}, budget);
    root.role = Role::kWindow;
    if (root.children.empty()) root.children.push_back(AXNode{});
    corpus.push_back(std::move(root));
  }
  auto identical = [](double edge, double leaves, double cm, double ged) {
    return edge == 1.0 && leaves == 1.0 && cm == 1.0 && ged == 0.0;
  };
  const fs::path dir = work / "self_comparison";
  fs::create_directories(dir);
  std::string pairs;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TreeReport r = evaluate_tree(corpus[i], corpus[i]);
    o.require(identical(r.edge_f1, r.leaves_f1, r.container_match, r.ged) && !r.ged_is_fallback,
              "tree " + std::to_string(i) + " is not identical to itself");
    char name[32];
    std::snprintf(name, sizeof name, "t%02zu.json", i);
    write_file_atomic(dir / name, serialize_tree(corpus[i]) + "\n");
    pairs += std::string("{\"image_id\":\"") + name + "\",\"pred_path\":\"" + name +
             "\",\"gt_path\":\"" + name + "\"}\n";
  }
  std::size_t cli_rows = 0;
  if (!cli.empty()) {
    write_file_atomic(dir / "pairs.jsonl", pairs);
    const fs::path out = dir / "report.json";
    const int code = run_cli(cli, "eval-tree --pairs \"" + (dir / "pairs.jsonl").string() +
                                      "\" --out \"" + out.string() + "\"");
    o.require(code == 0, "eval-tree exited with " + std::to_string(code));
    if (code == 0) {
      const auto report = nlohmann::json::parse(read_file(out));
      for (const auto& img : report["images"]) {
        ++cli_rows;
        o.require(identical(img["edge_f1"].get<double>(), img["leaves_f1"].get<double>(),
                            img["container_match"].get<double>(), img["ged"].get<double>()),
                  "eval-tree differs for " + img["image_id"].get<std::string>());
      }
    }
  }
  o.require(cli_rows == corpus.size(), "eval-tree did not report every tree");
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "took " + std::to_string(secs) + " s");
  o.detail << (o.pass ? "" : "; ") << corpus.size() << " trees (library and eval-tree) in "
           << secs << " s";
  return o;
}

Outcome ged_soundness() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937 rng(12345);
  int exact = 0, sound = 0;
  const int pairs = 200;
  for (int i = 0; i < pairs; ++i) {
    const AXNode a = testing::random_tree(rng, 1 + static_cast<int>(rng() % 6));
    const AXNode b = testing::random_tree(rng, 1 + static_cast<int>(rng() % 6));
    const int truth = testing::exact_ged(a, b);
    const GedResult r = ged_upper_bound(a, b);
    sound += !r.is_fallback && r.ged >= truth;
    exact += r.ged == truth;
  }
  const double secs = seconds_since(t0);
  o.require(sound == pairs, "upper bound violated");
  o.require(exact * 100 >= 60 * pairs, "too few exact");
  o.require(secs < 60.0, "too slow");
  o.detail << (o.pass ? "" : "; ") << sound << "/" << pairs << " sound, " << exact << "/"
           << pairs << " exact, " << secs << " s";
  return o;
}

Outcome detection_oracle() {
  Outcome o;
  const auto fx = testing::load_detection_fixture();
  const auto& e = fx.expected;
  const DetectionReport r = evaluate_detections(fx.images);
  auto near = [&](double got, const nlohmann::ordered_json& want, const std::string& name) {
    o.require(std::fabs(got - testing::fraction(want.get<std::string>())) <= 1e-9,
              name + " = " + std::to_string(got));
  };
  near(r.accuracy_at_50, e["accuracy_at_50"], "accuracy@50");
  near(r.precision, e["precision"], "precision");
  near(r.recall, e["recall"], "recall");
  near(r.f1, e["f1"], "f1");
  near(r.map50, e["map50"], "map50");
  near(r.map50_95, e["map50_95"], "map50_95");
  std::size_t classes = 0;
  for (const auto& [name, value] : e["ap50"].items()) {
    for (const auto& s : r.per_class) {
      if (to_string(s.cls) != name) continue;
      ++classes;
      o.require(s.ap50.has_value(), name + " has no AP50");
      if (s.ap50) near(*s.ap50, value, "AP50 " + name);
    }
  }
  o.require(classes == e["ap50"].size(), "missing class rows");
  if (o.pass) o.detail << "accuracy@50, P, R, F1, AP50 x" << classes << ", mAP within 1e-9";
  return o;
}

Outcome boundary_suite() {
  Outcome o;
  const auto cases = testing::grouping_boundary_cases();
  int passed = 0;
  for (const auto& c : cases) {
    passed += c.actual == c.expected;
    o.require(c.actual == c.expected, c.name);
  }
  o.detail << (o.pass ? "" : "; ") << passed << "/" << cases.size() << " cases";
  return o;
}

DescribedElement element(BBox b) {
  DescribedElement e;
  e.detection = {b, SimplifiedRole::kButton, 0.5};
  return e;
}

void leaves_of(const AXNode& n, bool root, std::vector<BBox>& out) {
  if (!root && n.is_leaf() && n.role != Role::kGroup) out.push_back(n.bbox);
  for (const AXNode& c : n.children) leaves_of(c, false, out);
}

bool containment_ok(const AXNode& n, bool root, double t) {
  for (const AXNode& c : n.children) {
    if (!root && containment(c.bbox, n.bbox) < t) return false;
    if (!containment_ok(c, false, t)) return false;
  }
  return true;
}

Outcome assembly_invariants() {
  Outcome o;
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> pos(0, 1800), big(20, 600), small(4, 120);
  AssemblyConfig cfg;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    std::vector<DescribedElement> els;
    std::vector<GroupBox> groups;
    const int ne = 1 + static_cast<int>(rng() % 40), ng = static_cast<int>(rng() % 16);
    for (int i = 0; i < ne; ++i) {
      els.push_back(element({std::round(pos(rng)), std::round(pos(rng) / 2),
                             std::round(small(rng)), std::round(small(rng) / 2)}));
    }
    for (int i = 0; i < ng; ++i) {
      groups.push_back({{std::round(pos(rng)), std::round(pos(rng) / 2), std::round(big(rng)),
                         std::round(big(rng))},
                        0.01 * (i + 1), GroupSource::kModel});
    }
    const AXNode root = assemble({1920, 1080}, els, groups, cfg);
    std::vector<BBox> got, want;
    leaves_of(root, true, got);
    for (const auto& e : els) want.push_back(e.detection.bbox);
    std::sort(got.begin(), got.end(), reading_order_less);
    std::sort(want.begin(), want.end(), reading_order_less);
    o.require(got == want, "element multiset changed in trial " + std::to_string(t));
    o.require(containment_ok(root, true, cfg.containment_threshold),
              "containment violated in trial " + std::to_string(t));
    std::shuffle(els.begin(), els.end(), rng);
    std::shuffle(groups.begin(), groups.end(), rng);
    o.require(assemble({1920, 1080}, els, groups, cfg) == root,
              "permutation changed trial " + std::to_string(t));
  }

  std::vector<DescribedElement> els;
  std::vector<GroupBox> groups;
  for (int i = 0; i < 200; ++i) {
    els.push_back(element({std::round(pos(rng)), std::round(pos(rng) / 2), 40, 20}));
  }
  for (int i = 0; i < 80; ++i) {
    groups.push_back({{std::round(pos(rng)), std::round(pos(rng) / 2), std::round(big(rng)),
                       std::round(big(rng))},
                      0.01 * (i + 1), GroupSource::kModel});
  }
  double best = 1e9;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    const AXNode root = assemble({1920, 1080}, els, groups, cfg);
    best = std::min(best, seconds_since(t0));
    (void)root;
  }
  o.require(best < 0.1, "200+80 assembly took " + std::to_string(best) + " s");
  o.detail << (o.pass ? "" : "; ") << trials << " randomized inputs, 200 elements + 80 groups in "
           << best * 1000 << " ms";
  return o;
}

Outcome cider_oracle() {
  Outcome o;
  const auto doc = nlohmann::json::parse(testing::read_fixture("cider_pairs.json"));
  std::vector<std::string> cands;
  std::vector<std::vector<std::string>> refs;
  std::vector<double> raw;
  for (const auto& item : doc["items"]) {
    cands.push_back(item["candidate"]);
    refs.push_back(item["references"]);
    raw.push_back(item["raw"]);
  }
  const CiderResult r = cider(cands, refs);
  double worst = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) worst = std::max(worst, std::fabs(r.raw[i] - raw[i]));
  o.require(raw.size() == 20, "fixture does not hold 20 pairs");
  o.require(worst <= 1e-6, "max raw deviation " + std::to_string(worst));

  const std::vector<std::string> same{"open the settings panel", "delete every selected file"};
  const std::vector<std::vector<std::string>> same_refs{{same[0]}, {same[1]}};
  const CiderResult id = cider(same, same_refs);
  o.require(std::fabs(id.normalized[0] - 1.0) < 1e-12 &&
                std::fabs(id.normalized[1] - 1.0) < 1e-12,
            "identical string is not 1.0");

  const std::vector<std::string> dis{"alpha beta gamma", "delta epsilon"};
  const std::vector<std::vector<std::string>> dis_refs{{"one two three"}, {"four five"}};
  o.require(cider(dis, dis_refs).normalized[0] == 0.0, "disjoint vocabulary is not 0.0");
  o.detail << (o.pass ? "" : "; ") << "max raw deviation " << worst
           << " over 20 pairs; identical 1.0; disjoint 0.0";
  return o;
}

Outcome agent_determinism(const std::string& cli, const fs::path& work) {
  Outcome o;
  const auto manifest = testing::fixture_path("agent/manifest.jsonl").string();
  const auto mock = testing::fixture_path("agent/mock_responses.jsonl").string();
  const auto expected = nlohmann::json::parse(testing::read_fixture("agent/expected.json"));
  std::string results[2], summaries[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = work / ("results_" + std::to_string(i) + ".jsonl");
    const fs::path sum = work / ("summary_" + std::to_string(i) + ".json");
    const int code = run_cli(cli, "bench-agent \"" + manifest + "\" --mock-client \"" + mock +
                                      "\" --out \"" + out.string() + "\" --summary \"" +
                                      sum.string() + "\"");
    o.require(code == 0, "bench-agent exited with " + std::to_string(code));
    if (code != 0) return o;
    results[i] = read_file(out);
    summaries[i] = read_file(sum);
  }
  o.require(results[0] == results[1], "result files differ");
  o.require(summaries[0] == summaries[1], "summary files differ");
  const auto s = nlohmann::json::parse(summaries[0]);
  const double rate = s["success_rate"].get<double>();
  o.require(rate == expected["success_rate"].get<double>(),
            "success rate " + std::to_string(rate));
  std::size_t lines = std::count(results[0].begin(), results[0].end(), '\n');
  o.require(lines == expected["records"].get<std::size_t>(), "wrong record count");
  o.detail << (o.pass ? "" : "; ") << "success rate " << rate << " over " << lines
           << " records, byte-identical twice";
  return o;
}

Outcome round_trip() {
  Outcome o;
  const std::string text = testing::read_fixture("listing1.json");
  const AXNode a = parse_tree(text);
  const std::string s1 = serialize_tree(a);
  const AXNode b = parse_tree(s1);
  o.require(a == b, "parse(serialize(parse)) differs");
  std::string s2;
  for (int i = 0; i < 5; ++i) {
    s2 = serialize_tree(parse_tree(s1));
    o.require(s2 == s1, "serialization is not byte-stable");
  }
  o.detail << (o.pass ? "" : "; ") << flatten(a).size() << " nodes, " << s1.size()
           << " canonical bytes";
  return o;
}

}  // namespace
}  // namespace axsynth

int main(int argc, char** argv) {
  using namespace axsynth;
  std::string cli;
  fs::path work = fs::temp_directory_path() / "axsynth_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli = argv[i + 1];
    else if (flag == "--work-dir") work = argv[i + 1];
  }
  fs::create_directories(work);

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"self-comparison identities", [&] { return self_comparison(cli, work); }},
      {"GED upper-bound soundness", ged_soundness},
      {"detection-metric oracle", detection_oracle},
      {"heuristic boundary suite", boundary_suite},
      {"assembly invariants", assembly_invariants},
      {"CIDEr oracle", cider_oracle},
      {"offline agent benchmark determinism",
       [&] {
         if (cli.empty()) {
           Outcome o;
           o.require(false, "no --cli given");
           return o;
         }
         return agent_determinism(cli, work);
       }},
      {"tree round-trip", round_trip},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].name
              << ": " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
