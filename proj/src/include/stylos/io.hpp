#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stylos::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);
std::vector<std::string> read_lines(const fs::path& path);

// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const fs::path& path, const std::string& content);

void ensure_dir(const fs::path& dir);

// Recursive listing of regular files under root, sorted by relative path.
std::vector<fs::path> list_files(const fs::path& root);

}  // namespace stylos::io
