#include "axsynth/role.h"

#include <array>
#include <cctype>

namespace axsynth {
namespace {

struct RoleInfo {
  Role role;
  std::string_view name;
  SimplifiedRole simple;
};

constexpr std::array kRoles = {
#define AXSYNTH_ROLE_INFO(id, wire, simplified) \
  RoleInfo{Role::id, wire, SimplifiedRole::simplified},
    AXSYNTH_ROLE_LIST(AXSYNTH_ROLE_INFO)
#undef AXSYNTH_ROLE_INFO
};
static_assert(kRoles.size() == kRoleCount);

constexpr std::array<Role, kRoleCount> make_role_values() {
  std::array<Role, kRoleCount> out{};
  for (std::size_t i = 0; i < kRoleCount; ++i) out[i] = kRoles[i].role;
  return out;
}
constexpr auto kRoleValues = make_role_values();

constexpr std::array kSimplified = {
    SimplifiedRole::kButton,    SimplifiedRole::kDisclosureTriangle,
    SimplifiedRole::kLink,      SimplifiedRole::kTextArea,
    SimplifiedRole::kImage,     SimplifiedRole::kStaticText,
    SimplifiedRole::kGroup,
};
static_assert(kSimplified.size() == kSimplifiedRoleCount);

// Detector output order; also the class-id order of normalized records.
constexpr std::array kDetector = {
    SimplifiedRole::kButton, SimplifiedRole::kDisclosureTriangle,
    SimplifiedRole::kImage,  SimplifiedRole::kLink,
    SimplifiedRole::kTextArea,
};

}  // namespace

std::span<const Role> all_roles() { return kRoleValues; }
std::span<const SimplifiedRole> all_simplified_roles() { return kSimplified; }
std::span<const SimplifiedRole> detector_classes() { return kDetector; }

std::string_view to_string(Role role) {
  return kRoles[static_cast<std::size_t>(role)].name;
}

std::string_view to_string(SimplifiedRole role) {
  return to_string(to_role(role));
}

std::optional<Role> role_from_string(std::string_view name) {
  for (const auto& info : kRoles) {
    if (info.name == name) return info.role;
  }
  return std::nullopt;
}

std::optional<SimplifiedRole> simplified_role_from_string(
    std::string_view name) {
  for (SimplifiedRole r : kSimplified) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

SimplifiedRole simplify_role(Role role) {
  return kRoles[static_cast<std::size_t>(role)].simple;
}

Role to_role(SimplifiedRole role) {
  switch (role) {
    case SimplifiedRole::kButton:
      return Role::kButton;
    case SimplifiedRole::kDisclosureTriangle:
      return Role::kDisclosureTriangle;
    case SimplifiedRole::kLink:
      return Role::kLink;
    case SimplifiedRole::kTextArea:
      return Role::kTextArea;
    case SimplifiedRole::kImage:
      return Role::kImage;
    case SimplifiedRole::kStaticText:
      return Role::kStaticText;
    case SimplifiedRole::kGroup:
      return Role::kGroup;
  }
  return Role::kGroup;
}

bool is_detector_class(SimplifiedRole role) {
  return role != SimplifiedRole::kStaticText && role != SimplifiedRole::kGroup;
}

std::string role_description(SimplifiedRole role) {
  if (role == SimplifiedRole::kStaticText) return "text";
  std::string_view name = to_string(role);
  name.remove_prefix(2);  // "AX"
  std::string out;
  for (char c : name) {
    if (std::isupper(static_cast<unsigned char>(c)) && !out.empty()) {
      out.push_back(' ');
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace axsynth
