#include <random>

#include <gtest/gtest.h>

#include "../support/fixtures.h"
#include "../support/random_trees.h"
#include "axsynth/errors.h"
#include "axsynth/tree.h"

namespace axsynth {
namespace {

constexpr const char* kMinimal =
    R"({"name":null,"role":"AXWindow","description":null,"role_description":null,"value":null,"children":[],"bbox":[0,0,1,1],"visible_bbox":null})";

TEST(ParseTree, Listing1Shape) {
  const AXNode t = parse_tree(testing::read_fixture("listing1.json"));
  EXPECT_EQ(t.role, Role::kWindow);
  ASSERT_EQ(t.children.size(), 4u);
  EXPECT_EQ(t.children[0].role, Role::kGroup);
  EXPECT_EQ(t.children[0].children.size(), 10u);
  EXPECT_EQ(t.children[0].children[0].bbox, (BBox{844, -296, 40, 40}));
  EXPECT_FALSE(t.children[0].children[0].visible_bbox.has_value());
  EXPECT_EQ(t.children[0].children[9].value, "Prepare for working on: \"work\"");
}

TEST(ParseTree, Minimal) {
  const AXNode t = parse_tree(kMinimal);
  EXPECT_TRUE(t.is_leaf());
  EXPECT_FALSE(t.name.has_value());
}

TEST(ParseTree, UnknownRole) {
  std::string s = kMinimal;
  s.replace(s.find("AXWindow"), 8, "AXBanana");
  try {
    parse_tree(s);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("AXBanana"), std::string::npos);
  }
}

TEST(ParseTree, BadArityAndJson) {
  std::string s = kMinimal;
  s.replace(s.find("[0,0,1,1]"), 9, "[0,0,1]");
  EXPECT_THROW(parse_tree(s), ParseError);
  EXPECT_THROW(parse_tree("{"), ParseError);
}

TEST(SerializeTree, MinimalCanonical) {
  EXPECT_EQ(serialize_tree(parse_tree(kMinimal)), kMinimal);
}

TEST(SerializeTree, Listing1RoundTrip) {
  const AXNode t = parse_tree(testing::read_fixture("listing1.json"));
  const std::string s = serialize_tree(t);
  EXPECT_EQ(parse_tree(s), t);
  EXPECT_EQ(serialize_tree(parse_tree(s)), s);
  EXPECT_EQ(s.find('\n'), std::string::npos);
  EXPECT_NE(s.find("[844,-296,40,40]"), std::string::npos);
}

TEST(SerializeTree, FractionalCoordinates) {
  AXNode n;
  n.role = Role::kWindow;
  n.bbox = {0.5, 1, 2.25, 3};
  const std::string s = serialize_tree(n);
  EXPECT_NE(s.find("[0.5,1,2.25,3]"), std::string::npos);
  EXPECT_EQ(parse_tree(s), n);
}

TEST(Flatten, Listing1) {
  const AXNode t = parse_tree(testing::read_fixture("listing1.json"));
  const auto flat = flatten(t);
  ASSERT_EQ(flat.size(), 15u);
  EXPECT_EQ(flat[0].depth, 1);
  EXPECT_TRUE(flat[0].path.empty());
  EXPECT_EQ(flat[1].node, &t.children[0]);
  EXPECT_EQ(flat[2].path, (std::vector<std::size_t>{0, 0}));
  EXPECT_EQ(flat[12].node, &t.children[1]);
}

TEST(TreeStats, Listing1) {
  const TreeStats s = tree_stats(parse_tree(testing::read_fixture("listing1.json")));
  EXPECT_EQ(s.node_count, 15u);
  EXPECT_EQ(s.max_depth, 3u);
  EXPECT_EQ(s.element_count, 13u);
  EXPECT_EQ(s.group_count, 1u);
}

TEST(TreeStats, SingleNodeAndChain) {
  AXNode root;
  EXPECT_EQ(tree_stats(root), (TreeStats{1, 1, 1, 0}));
  root.children.emplace_back();
  root.children[0].children.emplace_back();
  EXPECT_EQ(tree_stats(root).max_depth, 3u);
}

TEST(TreeProperties, FlattenMatchesNodeCountAndRoundTrips) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    const AXNode t = testing::random_tree(rng, 1 + i % 12);
    EXPECT_EQ(flatten(t).size(), tree_stats(t).node_count);
    EXPECT_EQ(parse_tree(serialize_tree(t)), t);
  }
}

}  // namespace
}  // namespace axsynth
