#pragma once

#include <climits>
#include <optional>
#include <string_view>

namespace axsynth::detail {

// First maximal run of ASCII digits, saturating at LLONG_MAX.
inline std::optional<long long> first_integer(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && !(s[i] >= '0' && s[i] <= '9')) ++i;
  if (i == s.size()) return std::nullopt;
  long long v = 0;
  for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
    const int d = s[i] - '0';
    if (v > (LLONG_MAX - d) / 10) {
      v = LLONG_MAX;
    } else {
      v = v * 10 + d;
    }
  }
  return v;
}

}  // namespace axsynth::detail
