#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace axsynth {

// Reduced taxonomy used by the detector, the tree builder and the metrics.
enum class SimplifiedRole : std::uint8_t {
  kButton,
  kDisclosureTriangle,
  kLink,
  kTextArea,
  kImage,
  kStaticText,
  kGroup,
};

// Platform accessibility roles. X(enumerator, wire name, simplified role).
#define AXSYNTH_ROLE_LIST(X)                                        \
  X(kGroup, "AXGroup", kGroup)                                      \
  X(kOpaqueProviderGroup, "AXOpaqueProviderGroup", kGroup)          \
  X(kRadioGroup, "AXRadioGroup", kGroup)                            \
  X(kSplitGroup, "AXSplitGroup", kGroup)                            \
  X(kTabGroup, "AXTabGroup", kGroup)                                \
  X(kToolbar, "AXToolbar", kGroup)                                  \
  X(kWebArea, "AXWebArea", kGroup)                                  \
  X(kOutline, "AXOutline", kGroup)                                  \
  X(kSplitter, "AXSplitter", kGroup)                                \
  X(kSheet, "AXSheet", kGroup)                                      \
  X(kBrowser, "AXBrowser", kGroup)                                  \
  X(kPopover, "AXPopover", kGroup)                                  \
  X(kGrid, "AXGrid", kGroup)                                        \
  X(kGrowArea, "AXGrowArea", kGroup)                                \
  X(kList, "AXList", kGroup)                                        \
  X(kTable, "AXTable", kGroup)                                      \
  X(kScrollArea, "AXScrollArea", kGroup)                            \
  X(kWindow, "AXWindow", kGroup)                                    \
  X(kPage, "AXPage", kGroup)                                        \
  X(kStaticText, "AXStaticText", kStaticText)                       \
  X(kHeading, "AXHeading", kStaticText)                             \
  X(kLink, "AXLink", kLink)                                         \
  X(kCheckBox, "AXCheckBox", kButton)                               \
  X(kRadioButton, "AXRadioButton", kButton)                         \
  X(kSlider, "AXSlider", kButton)                                   \
  X(kComboBox, "AXComboBox", kTextArea)                             \
  X(kScrollBar, "AXScrollBar", kGroup)                              \
  X(kButton, "AXButton", kButton)                                   \
  X(kPopUpButton, "AXPopUpButton", kButton)                         \
  X(kMenuButton, "AXMenuButton", kButton)                           \
  X(kDisclosureTriangle, "AXDisclosureTriangle", kDisclosureTriangle) \
  X(kIncrementor, "AXIncrementor", kButton)                         \
  X(kColorWell, "AXColorWell", kButton)                             \
  X(kIncrementorArrow, "AXIncrementorArrow", kButton)               \
  X(kTextField, "AXTextField", kTextArea)                           \
  X(kTextArea, "AXTextArea", kTextArea)                             \
  X(kDateTimeArea, "AXDateTimeArea", kTextArea)                     \
  X(kCell, "AXCell", kGroup)                                        \
  X(kImage, "AXImage", kImage)                                      \
  X(kBusyIndicator, "AXBusyIndicator", kImage)                      \
  X(kUnknown, "AXUnknown", kGroup)                                  \
  X(kGenericElement, "AXGenericElement", kGroup)                    \
  X(kRuler, "AXRuler", kGroup)                                      \
  X(kSWTComposite, "SWTComposite", kGroup)                          \
  X(kJavaAxIgnore, "JavaAxIgnore", kGroup)                          \
  X(kMenuItem, "AXMenuItem", kButton)                               \
  X(kMenu, "AXMenu", kGroup)                                        \
  X(kMenuBar, "AXMenuBar", kGroup)                                  \
  X(kMenuBarItem, "AXMenuBarItem", kButton)                         \
  X(kListMarker, "AXListMarker", kStaticText)                       \
  X(kValueIndicator, "AXValueIndicator", kButton)                   \
  X(kProgressIndicator, "AXProgressIndicator", kImage)

enum class Role : std::uint8_t {
#define AXSYNTH_ROLE_ENUM(id, name, simple) id,
  AXSYNTH_ROLE_LIST(AXSYNTH_ROLE_ENUM)
#undef AXSYNTH_ROLE_ENUM
};

inline constexpr std::size_t kRoleCount = 52;
inline constexpr std::size_t kSimplifiedRoleCount = 7;

std::span<const Role> all_roles();
std::span<const SimplifiedRole> all_simplified_roles();

std::string_view to_string(Role role);
std::string_view to_string(SimplifiedRole role);

std::optional<Role> role_from_string(std::string_view name);
std::optional<SimplifiedRole> simplified_role_from_string(std::string_view name);

// Total over all roles.
SimplifiedRole simplify_role(Role role);

// The platform role carrying the same wire name (AXButton -> Role::kButton).
Role to_role(SimplifiedRole role);

// The five classes emitted by the element detector.
bool is_detector_class(SimplifiedRole role);
std::span<const SimplifiedRole> detector_classes();

// Lowercase, space-separated spelling used for role_description
// ("AXDisclosureTriangle" -> "disclosure triangle"). Static text reads
// "text", as the platform reports it.
std::string role_description(SimplifiedRole role);

}  // namespace axsynth
