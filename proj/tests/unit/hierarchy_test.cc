#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "axsynth/errors.h"
#include "axsynth/hierarchy.h"

namespace axsynth {
namespace {

DescribedElement el(BBox b, SimplifiedRole cls = SimplifiedRole::kButton,
                    std::optional<std::string> desc = std::nullopt) {
  DescribedElement e;
  e.detection = {b, cls, 0.9};
  e.description = desc;
  if (desc) e.source = DescriptionSource::kOcr;
  return e;
}

GroupBox grp(BBox b, double conf = 1.0) { return {b, conf, GroupSource::kModel}; }

TEST(DedupeGroups, IdenticalBoxesCollapse) {
  const std::vector<GroupBox> g{grp({0, 0, 100, 100}, 0.5),
                                grp({0, 0, 100, 100}, 0.7)};
  const auto out = dedupe_groups(g, AssemblyConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.7);
}

TEST(DedupeGroups, HighIouMergesIntoUnion) {
  // IoU = 9200 / 10800 ~ 0.85.
  const std::vector<GroupBox> g{grp({0, 0, 100, 100}, 0.9),
                                grp({8, 0, 100, 100}, 0.8)};
  const auto out = dedupe_groups(g, AssemblyConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].bbox, (BBox{0, 0, 108, 100}));
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.9);
}

TEST(DedupeGroups, DisjointKeptSortedByArea) {
  const std::vector<GroupBox> g{grp({0, 0, 10, 10}), grp({50, 50, 40, 40})};
  const auto out = dedupe_groups(g, AssemblyConfig{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].bbox, (BBox{50, 50, 40, 40}));
}

TEST(Assemble, GroupWithTwoElements) {
  const std::vector<DescribedElement> els{el({10, 40, 50, 20}),
                                          el({10, 10, 50, 20}, SimplifiedRole::kButton, "OK")};
  const std::vector<GroupBox> g{grp({5, 5, 100, 100})};
  const AXNode root = assemble({800, 600}, els, g, AssemblyConfig{});
  EXPECT_EQ(root.role, Role::kWindow);
  EXPECT_EQ(root.bbox, (BBox{0, 0, 800, 600}));
  ASSERT_EQ(root.children.size(), 1u);
  const AXNode& group = root.children[0];
  EXPECT_EQ(group.role, Role::kGroup);
  ASSERT_EQ(group.children.size(), 2u);
  EXPECT_EQ(group.children[0].bbox, (BBox{10, 10, 50, 20}));
  EXPECT_EQ(group.children[0].description, "OK");
  EXPECT_EQ(group.children[0].role, Role::kButton);
  EXPECT_EQ(group.children[0].role_description, "button");
  EXPECT_EQ(group.children[1].bbox, (BBox{10, 40, 50, 20}));
}

TEST(Assemble, ElementOutsideGroupsGoesToRoot) {
  const std::vector<DescribedElement> els{el({10, 10, 20, 20}),
                                          el({500, 500, 20, 20})};
  const std::vector<GroupBox> g{grp({0, 0, 100, 100})};
  const AXNode root = assemble({800, 600}, els, g, AssemblyConfig{});
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(root.children[0].role, Role::kGroup);
  EXPECT_EQ(root.children[1].bbox, (BBox{500, 500, 20, 20}));
  EXPECT_TRUE(root.children[1].is_leaf());
}

TEST(Assemble, SmallestContainerNests) {
  const std::vector<DescribedElement> els{el({20, 20, 10, 10})};
  const std::vector<GroupBox> g{grp({0, 0, 200, 200}), grp({10, 10, 50, 50})};
  const AXNode root = assemble({800, 600}, els, g, AssemblyConfig{});
  ASSERT_EQ(root.children.size(), 1u);
  const AXNode& g1 = root.children[0];
  EXPECT_EQ(g1.bbox, (BBox{0, 0, 200, 200}));
  ASSERT_EQ(g1.children.size(), 1u);
  const AXNode& g2 = g1.children[0];
  EXPECT_EQ(g2.bbox, (BBox{10, 10, 50, 50}));
  ASSERT_EQ(g2.children.size(), 1u);
  EXPECT_EQ(g2.children[0].bbox, (BBox{20, 20, 10, 10}));
}

TEST(Assemble, EmptyGroupsDroppedUnlessDisabled) {
  const std::vector<DescribedElement> els{el({500, 500, 20, 20})};
  const std::vector<GroupBox> g{grp({0, 0, 100, 100})};
  EXPECT_EQ(assemble({800, 600}, els, g, AssemblyConfig{}).children.size(), 1u);
  AssemblyConfig keep;
  keep.drop_empty_groups = false;
  EXPECT_EQ(assemble({800, 600}, els, g, keep).children.size(), 2u);
}

TEST(Assemble, DegenerateWindowThrows) {
  EXPECT_THROW(assemble({0, 600}, {}, {}, AssemblyConfig{}), ValidationError);
  EXPECT_THROW(assemble({800, -1}, {}, {}, AssemblyConfig{}), ValidationError);
}

void collect_leaves(const AXNode& n, std::vector<BBox>& out, bool root) {
  if (!root && n.is_leaf() && n.role != Role::kGroup) out.push_back(n.bbox);
  for (const AXNode& c : n.children) collect_leaves(c, out, false);
}

void check_containment(const AXNode& n, bool is_root, double threshold) {
  for (const AXNode& c : n.children) {
    if (!is_root) EXPECT_GE(containment(c.bbox, n.bbox), threshold);
    check_containment(c, false, threshold);
  }
}

void check_sorted(const AXNode& n) {
  for (std::size_t i = 1; i < n.children.size(); ++i) {
    const BBox& a = n.children[i - 1].bbox;
    const BBox& b = n.children[i].bbox;
    EXPECT_LE(std::tie(a.y, a.x), std::tie(b.y, b.x));
  }
  for (const AXNode& c : n.children) check_sorted(c);
}

TEST(AssembleProperties, RandomInputs) {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> pos(0, 700), size(5, 300);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DescribedElement> els;
    std::vector<GroupBox> groups;
    const int ne = 1 + trial % 12, ng = trial % 7;
    for (int i = 0; i < ne; ++i) {
      els.push_back(el({double(pos(rng)), double(pos(rng)), double(size(rng) / 5 + 4),
                        double(size(rng) / 10 + 4)}));
    }
    for (int i = 0; i < ng; ++i) {
      groups.push_back(grp({double(pos(rng)), double(pos(rng)), double(size(rng)),
                            double(size(rng))},
                           (i + 1) / 10.0));
    }
    AssemblyConfig cfg;
    const AXNode root = assemble({1000, 1000}, els, groups, cfg);

    std::vector<BBox> leaves;
    collect_leaves(root, leaves, true);
    std::vector<BBox> inputs;
    for (const auto& e : els) inputs.push_back(e.detection.bbox);
    std::sort(leaves.begin(), leaves.end(), reading_order_less);
    std::sort(inputs.begin(), inputs.end(), reading_order_less);
    EXPECT_EQ(leaves, inputs);
    check_containment(root, true, cfg.containment_threshold);
    check_sorted(root);

    auto els2 = els;
    auto groups2 = groups;
    std::shuffle(els2.begin(), els2.end(), rng);
    std::shuffle(groups2.begin(), groups2.end(), rng);
    EXPECT_EQ(assemble({1000, 1000}, els2, groups2, cfg), root);
  }
}

}  // namespace
}  // namespace axsynth
