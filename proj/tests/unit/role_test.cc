#include <set>

#include <gtest/gtest.h>

#include "axsynth/role.h"

namespace axsynth {
namespace {

TEST(Role, FiftyTwoRolesRoundTrip) {
  EXPECT_EQ(all_roles().size(), 52u);
  std::set<std::string_view> names;
  for (Role r : all_roles()) {
    names.insert(to_string(r));
    EXPECT_EQ(role_from_string(to_string(r)), r);
  }
  EXPECT_EQ(names.size(), 52u);
}

TEST(Role, UnknownRejected) { EXPECT_FALSE(role_from_string("AXBanana").has_value()); }

TEST(SimplifyRole, TotalOverSevenClasses) {
  std::set<SimplifiedRole> seen;
  for (Role r : all_roles()) seen.insert(simplify_role(r));
  EXPECT_EQ(all_simplified_roles().size(), 7u);
  for (SimplifiedRole s : seen) {
    EXPECT_NE(std::find(all_simplified_roles().begin(), all_simplified_roles().end(), s),
              all_simplified_roles().end());
  }
}

TEST(SimplifyRole, Examples) {
  EXPECT_EQ(simplify_role(*role_from_string("AXRadioButton")), SimplifiedRole::kButton);
  EXPECT_EQ(simplify_role(*role_from_string("AXCheckBox")), SimplifiedRole::kButton);
  EXPECT_EQ(simplify_role(*role_from_string("AXHeading")), SimplifiedRole::kStaticText);
  EXPECT_EQ(simplify_role(*role_from_string("AXMenuBar")), SimplifiedRole::kGroup);
}

TEST(DetectorClasses, FiveClasses) {
  EXPECT_EQ(detector_classes().size(), 5u);
  EXPECT_FALSE(is_detector_class(SimplifiedRole::kStaticText));
  EXPECT_FALSE(is_detector_class(SimplifiedRole::kGroup));
  EXPECT_TRUE(is_detector_class(SimplifiedRole::kDisclosureTriangle));
}

TEST(RoleDescription, Lowercase) {
  EXPECT_EQ(role_description(SimplifiedRole::kButton), "button");
  EXPECT_EQ(role_description(SimplifiedRole::kDisclosureTriangle), "disclosure triangle");
}

}  // namespace
}  // namespace axsynth
