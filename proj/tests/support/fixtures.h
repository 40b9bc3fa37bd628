#pragma once

#include <filesystem>
#include <string>

#include "axsynth/io.h"

namespace axsynth::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(AXSYNTH_FIXTURE_DIR) / name;
}

inline std::string read_fixture(const std::string& name) {
  return read_file(fixture_path(name));
}

}  // namespace axsynth::testing
