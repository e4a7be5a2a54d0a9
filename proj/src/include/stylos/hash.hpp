#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace stylos::hash {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Incremental hasher for fingerprinting composite inputs.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  void update(std::string_view bytes);
  std::string hex();  // finalizes; do not call update afterwards

 private:
  void* ctx_;
};

}  // namespace stylos::hash
