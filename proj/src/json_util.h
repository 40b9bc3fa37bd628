#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "axsynth/errors.h"
#include "axsynth/geometry.h"
#include "json.hpp"

namespace axsynth::detail {

using Json = nlohmann::ordered_json;

// Integral values are emitted as JSON integers so that canonical output
// prints "40" rather than "40.0".
inline Json number_to_json(double v) {
  if (std::isfinite(v) && std::trunc(v) == v && std::fabs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

inline Json bbox_to_json(const BBox& b) {
  return Json::array({number_to_json(b.x), number_to_json(b.y),
                      number_to_json(b.w), number_to_json(b.h)});
}

inline BBox bbox_from_json(const Json& j, const std::string& where,
                           std::size_t line = 0) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(where + ": bbox must be an array of 4 numbers", line);
  }
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_number()) {
      throw ParseError(where + ": bbox entries must be numbers", line);
    }
    v[i] = j[i].get<double>();
  }
  BBox b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) {
    throw ParseError(where + ": bbox must be finite with w, h >= 0", line);
  }
  return b;
}

inline std::optional<std::string> optional_string(const Json& obj,
                                                  const char* key,
                                                  const std::string& where,
                                                  std::size_t line = 0) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ParseError(where + "." + key + ": expected string or null", line);
  }
  return it->get<std::string>();
}

inline const Json& required(const Json& obj, const char* key,
                            const std::string& where, std::size_t line = 0) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field \"" + key + "\"", line);
  }
  return *it;
}

inline std::string required_string(const Json& obj, const char* key,
                                   const std::string& where,
                                   std::size_t line = 0) {
  const Json& v = required(obj, key, where, line);
  if (!v.is_string()) {
    throw ParseError(where + "." + key + ": expected string", line);
  }
  return v.get<std::string>();
}

inline double required_number(const Json& obj, const char* key,
                              const std::string& where, std::size_t line = 0) {
  const Json& v = required(obj, key, where, line);
  if (!v.is_number()) {
    throw ParseError(where + "." + key + ": expected number", line);
  }
  return v.get<double>();
}

inline Json parse_json(const std::string& text, std::size_t line = 0) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line);
  }
}

}  // namespace axsynth::detail
