#include <gtest/gtest.h>

#include "axsynth/errors.h"
#include "axsynth/grouping.h"
#include "support/grouping_boundary.h"

namespace axsynth {
namespace {

DescribedElement element(BBox b, SimplifiedRole cls) {
  DescribedElement e;
  e.detection.bbox = b;
  e.detection.cls = cls;
  return e;
}

TEST(GroupingBoundary, EveryThreshold) {
  const auto cases = testing::grouping_boundary_cases();
  EXPECT_EQ(cases.size(), 45u);
  for (const auto& c : cases) EXPECT_EQ(c.actual, c.expected) << c.name;
}

TEST(GroupText, MergesCloseLines) {
  const std::vector<TextBox> texts{{{100, 100, 200, 20}, "File"},
                                   {{100, 134, 200, 30}, "Edit"}};
  const auto clusters = group_text(texts, GroupingConfig{});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].texts, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(clusters[0].bbox, (BBox{100, 100, 200, 64}));
  EXPECT_EQ(clusters[0].kind, ClusterKind::kText);
}

TEST(GroupText, NeedsHorizontalOverlap) {
  const std::vector<TextBox> texts{{{100, 100, 50, 20}, "a"},
                                   {{300, 125, 50, 20}, "b"}};
  EXPECT_TRUE(group_text(texts, GroupingConfig{}).empty());
}

TEST(GroupText, MergesTransitivelyInReadingOrder) {
  const std::vector<TextBox> texts{{{0, 60, 100, 20}, "c"},
                                   {{0, 0, 100, 20}, "a"},
                                   {{0, 30, 100, 20}, "b"},
                                   {{0, 500, 100, 20}, "far"}};
  const auto clusters = group_text(texts, GroupingConfig{});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].texts, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(AssociateCaptions, ImageWithLabelBelow) {
  const std::vector<DescribedElement> elements{
      element({100, 100, 100, 100}, SimplifiedRole::kImage)};
  const std::vector<TextBox> texts{{{110, 205, 80, 20}, "Photo"}};
  const auto clusters =
      associate_captions(elements, texts, {1000, 1000}, GroupingConfig{});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].elements, (std::vector<std::size_t>{0}));
  EXPECT_EQ(clusters[0].texts, (std::vector<std::size_t>{0}));
  EXPECT_EQ(clusters[0].bbox, (BBox{100, 100, 100, 125}));
}

TEST(AssociateCaptions, IgnoresOtherClasses) {
  const std::vector<DescribedElement> elements{
      element({100, 100, 100, 100}, SimplifiedRole::kLink)};
  const std::vector<TextBox> texts{{{110, 205, 80, 20}, "Photo"}};
  EXPECT_TRUE(
      associate_captions(elements, texts, {1000, 1000}, GroupingConfig{})
          .empty());
}

TEST(AssociateCaptions, NearestElementWins) {
  const std::vector<DescribedElement> elements{
      element({100, 100, 100, 100}, SimplifiedRole::kImage),
      element({100, 235, 100, 20}, SimplifiedRole::kButton)};
  const std::vector<TextBox> texts{{{110, 210, 80, 20}, "x"}};
  const auto clusters =
      associate_captions(elements, texts, {1000, 1000}, GroupingConfig{});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].elements, (std::vector<std::size_t>{1}));
}

TEST(FormLines, ColumnExample) {
  const std::vector<BBox> boxes{{50, 100, 30, 20}, {52, 144, 30, 20}};
  EXPECT_EQ(form_lines(boxes, LineAxis::kColumn, GroupingConfig{}).size(), 1u);
  const std::vector<BBox> apart{{50, 100, 30, 20}, {52, 146, 30, 20}};
  EXPECT_TRUE(form_lines(apart, LineAxis::kColumn, GroupingConfig{}).empty());
}

TEST(FormLines, ChainsAndNeverEmitsSingletons) {
  const std::vector<BBox> boxes{
      {0, 0, 30, 20}, {0, 30, 30, 20}, {0, 60, 30, 20}, {500, 500, 30, 20}};
  const auto clusters = form_lines(boxes, LineAxis::kColumn, GroupingConfig{});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].elements, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(clusters[0].bbox, (BBox{0, 0, 30, 80}));
  EXPECT_EQ(clusters[0].kind, ClusterKind::kColumn);
}

TEST(ColorRegions, SolidRectangle) {
  Raster img(640, 480, {240, 240, 240});
  img.fill_rect(100, 120, 200, 100, {30, 90, 200});
  const auto regions = color_regions(img, GroupingConfig{});
  ASSERT_EQ(regions.size(), 1u);
  const BBox& b = regions[0].bbox;
  EXPECT_NEAR(b.x, 100, 5);
  EXPECT_NEAR(b.y, 120, 5);
  EXPECT_NEAR(b.right(), 300, 5);
  EXPECT_NEAR(b.bottom(), 220, 5);
  EXPECT_EQ(regions[0].source, GroupSource::kColor);
}

TEST(ColorRegions, UniformRasterHasNone) {
  EXPECT_TRUE(color_regions(Raster(320, 200, {10, 10, 10}), GroupingConfig{})
                  .empty());
}

TEST(ColorRegions, SpecksAreRemoved) {
  Raster img(200, 200, {255, 255, 255});
  for (int y = 3; y < 200; y += 17) {
    for (int x = 5; x < 200; x += 13) img.fill_rect(x, y, 3, 4, {0, 0, 0});
  }
  EXPECT_TRUE(color_regions(img, GroupingConfig{}).empty());
}

TEST(ColorRegions, EmptyImageThrows) {
  EXPECT_THROW(color_regions(Raster(), GroupingConfig{}), Error);
}

TEST(GroupingConfig, ValidateRejectsOutOfRange) {
  GroupingConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.caption_x_overlap_min = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.max_region_frac = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.column_edge_tol = -1;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.color_top_k = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = ok;
  bad.color_quant_bits = 9;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(HeuristicGroups, OrderAndDeterminism) {
  const std::vector<DescribedElement> elements{
      element({100, 100, 100, 100}, SimplifiedRole::kImage),
      element({400, 100, 60, 20}, SimplifiedRole::kButton),
      element({400, 130, 60, 20}, SimplifiedRole::kButton)};
  const std::vector<TextBox> texts{{{110, 205, 80, 20}, "Photo"},
                                   {{600, 100, 200, 20}, "one"},
                                   {{600, 125, 200, 20}, "two"}};
  GroupingConfig cfg;
  const auto a = heuristic_groups(elements, texts, nullptr, {1000, 1000}, cfg);
  const auto b = heuristic_groups(elements, texts, nullptr, {1000, 1000}, cfg);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].source, GroupSource::kText);
  EXPECT_EQ(a[1].source, GroupSource::kCaption);
  EXPECT_EQ(a[2].source, GroupSource::kColumn);
  EXPECT_EQ(a[3].source, GroupSource::kRow);
  EXPECT_EQ(a[2].bbox, a[3].bbox);
  for (const auto& g : a) EXPECT_DOUBLE_EQ(g.confidence, 1.0);
}

}  // namespace
}  // namespace axsynth
