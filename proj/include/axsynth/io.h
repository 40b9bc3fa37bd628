#pragma once

#include <filesystem>
#include <string>

namespace axsynth {

// Whole-file read. Throws Error when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace axsynth
