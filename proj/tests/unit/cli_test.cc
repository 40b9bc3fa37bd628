#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "axsynth/io.h"
#include "json.hpp"
#include "support/fixtures.h"

namespace axsynth {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string("\"") + AXSYNTH_CLI_PATH + "\" " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("axsynth_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }
  fs::path dir_;
};

TEST_F(CliTest, EvalTreeSelfComparison) {
  const auto listing = testing::fixture_path("listing1.json");
  const auto r = run("eval-tree " + q(listing) + " " + q(listing));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["edge_f1"], 1.0);
  EXPECT_EQ(j["leaves_f1"], 1.0);
  EXPECT_EQ(j["container_match"], 1.0);
  EXPECT_EQ(j["ged"], 0);
}

TEST_F(CliTest, EvalTreePairs) {
  const auto listing = testing::fixture_path("listing1.json").string();
  const auto pairs = write("pairs.jsonl",
                           "{\"image_id\":\"b\",\"pred_path\":\"" + listing + "\",\"gt_path\":\"" +
                               listing + "\"}\n{\"image_id\":\"a\",\"pred_path\":\"" + listing +
                               "\",\"gt_path\":\"" + listing + "\"}\n");
  const auto r = run("eval-tree --pairs " + q(pairs) + " --csv " + q(dir_ / "t.csv"));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["images"][0]["image_id"], "a");
  EXPECT_EQ(j["mean"]["edge_f1"], 1.0);
  EXPECT_TRUE(read_file(dir_ / "t.csv").starts_with("image_id,edge_f1"));
}

TEST_F(CliTest, ValidateReportsFindings) {
  const auto good = write("good.jsonl",
                          "{\"bbox\":[1,2,3,4],\"class\":\"AXButton\",\"confidence\":0.5}\n");
  const auto bad = write("bad.jsonl",
                         "{\"bbox\":[1,2,3,4],\"class\":\"AXButton\",\"confidence\":0.5}\n"
                         "{\"bbox\":[1,2,3],\"class\":\"AXButton\",\"confidence\":0.5}\n");
  EXPECT_EQ(run("validate --kind detections " + q(good)).exit_code, 0);
  const auto r = run("validate --kind detections " + q(bad));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("line 2"), std::string::npos);
  EXPECT_EQ(run("validate --kind tree " + q(testing::fixture_path("listing1.json"))).exit_code, 0);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run("").exit_code, 1);
  EXPECT_EQ(run("no-such-command").exit_code, 1);
  EXPECT_EQ(run("eval-tree").exit_code, 1);
}

TEST_F(CliTest, MissingFileIsRuntimeError) {
  EXPECT_EQ(run("eval-tree " + q(dir_ / "nope.json") + " " + q(dir_ / "nope.json")).exit_code, 2);
}

TEST_F(CliTest, BenchAgentDeterministic) {
  const auto manifest = testing::fixture_path("agent/manifest.jsonl");
  const auto mock = testing::fixture_path("agent/mock_responses.jsonl");
  const auto base = "bench-agent " + q(manifest) + " --mock-client " + q(mock);
  ASSERT_EQ(run(base + " --out " + q(dir_ / "r1.jsonl") + " --summary " + q(dir_ / "s1.json")).exit_code, 0);
  ASSERT_EQ(run(base + " --out " + q(dir_ / "r2.jsonl") + " --summary " + q(dir_ / "s2.json")).exit_code, 0);
  EXPECT_EQ(read_file(dir_ / "r1.jsonl"), read_file(dir_ / "r2.jsonl"));
  EXPECT_EQ(read_file(dir_ / "s1.json"), read_file(dir_ / "s2.json"));
  const auto s = nlohmann::json::parse(read_file(dir_ / "s1.json"));
  EXPECT_DOUBLE_EQ(s["success_rate"].get<double>(), 0.55);
}

TEST_F(CliTest, BuildAndStats) {
  write("d.jsonl",
        "{\"bbox\":[10,10,100,30],\"class\":\"AXButton\",\"confidence\":0.9}\n"
        "{\"bbox\":[10,50,100,30],\"class\":\"AXButton\",\"confidence\":0.9}\n");
  write("o.jsonl", "{\"text\":\"Save\",\"bbox\":[20,15,40,20],\"confidence\":0.9}\n");
  const auto manifest = write(
      "run.jsonl",
      "{\"image_id\":\"s1\",\"detections_path\":\"d.jsonl\",\"ocr_path\":\"o.jsonl\","
      "\"output_tree_path\":\"out/s1.json\",\"image_width\":800,\"image_height\":600}\n");
  const auto r = run("build " + q(manifest));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("s1\t"), std::string::npos);
  const std::string tree = read_file(dir_ / "out/s1.json");
  EXPECT_NE(tree.find("\"Save\""), std::string::npos);
  EXPECT_EQ(run("validate --kind tree " + q(dir_ / "out/s1.json")).exit_code, 0);
  const auto st = run("stats " + q(dir_ / "out"));
  ASSERT_EQ(st.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(st.out)["trees"], 1);
  EXPECT_EQ(run("build " + q(manifest) + " --groups bogus").exit_code, 1);
}

TEST_F(CliTest, ConvertRoundTrip) {
  const auto in = write("d.jsonl",
                        "{\"bbox\":[450,360,100,80],\"class\":\"AXLink\",\"confidence\":0.5}\n");
  ASSERT_EQ(run("convert " + q(in) + " " + q(dir_ / "n.txt") +
                " --to normalized --width 1000 --height 800")
                .exit_code,
            0);
  ASSERT_EQ(run("convert " + q(dir_ / "n.txt") + " " + q(dir_ / "back.jsonl") +
                " --width 1000 --height 800")
                .exit_code,
            0);
  const auto j = nlohmann::json::parse(read_file(dir_ / "back.jsonl"));
  EXPECT_EQ(j["bbox"], nlohmann::json::parse("[450,360,100,80]"));
  EXPECT_EQ(j["class"], "AXLink");
}

TEST_F(CliTest, EvalDetAndCaption) {
  const auto d = write("d.jsonl",
                       "{\"bbox\":[0,0,10,10],\"class\":\"AXButton\",\"confidence\":0.9}\n");
  const auto r = run("eval-det " + q(d) + " " + q(d));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["map50"], 1.0);

  const auto cands = write("c.jsonl",
                           "{\"element_key\":\"a:0,0,1,1\",\"caption\":\"close the main window\"}\n"
                           "{\"element_key\":\"a:5,5,1,1\",\"caption\":\"open the file menu\"}\n");
  const auto mock = write("m.jsonl", "{\"response\":\"1\"}\n");
  const auto c = run("eval-caption " + q(cands) + " " + q(cands) + " --judge --mock-client " + q(mock));
  ASSERT_EQ(c.exit_code, 0);
  const auto j = nlohmann::json::parse(c.out);
  EXPECT_NEAR(j["cider"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(j["judge_accuracy"], 1.0);
}

TEST_F(CliTest, RenderWritesPng) {
  const std::string ppm = "P6\n4 4\n255\n" + std::string(48, '\x10');
  const auto img = write("s.ppm", ppm);
  const auto d = write("d.jsonl",
                       "{\"bbox\":[0,0,3,3],\"class\":\"AXButton\",\"confidence\":0.9}\n");
  ASSERT_EQ(run("render --image " + q(img) + " --elements " + q(d) + " --out " + q(dir_ / "o.png")).exit_code, 0);
  EXPECT_TRUE(fs::file_size(dir_ / "o.png") > 0);
}

}  // namespace
}  // namespace axsynth
