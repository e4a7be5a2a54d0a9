#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylos/ingest.hpp"

namespace stylos::mlm {

namespace fs = std::filesystem;

struct MlmConfig {
  std::string base_checkpoint = "tiny";  // backend spec or checkpoint directory
  double learning_rate = 1e-4;
  int block_size = 512;
  int epochs = 1;  // single pass by default
  double mask_probability = 0.15;
  uint64_t seed = 0;
  int batch_size = 16;
  // tiny backend knobs
  int embed_dim = 32;
  long max_vocab = 50000;

  void validate() const;
  nlohmann::json to_json() const;
  static MlmConfig from_json(const nlohmann::json& j);
};

// One sentence per line, UTF-8, stable (doc_id, sentence index) order.
// Errors on an empty corpus.
std::vector<std::string> prepare_mlm_lines(const std::vector<ingest::NormalizedDocument>& corpus);
void write_lines(const fs::path& path, const std::vector<std::string>& lines);

struct RunManifest {
  MlmConfig config;
  std::string corpus_fingerprint;  // sha256 of the line file content
  long line_count = 0;
  double final_loss = 0;  // mean masked cross-entropy over the last pass
  double wall_time_seconds = 0;
  std::string checkpoint_path;
  std::string tokenizer_id;
  std::vector<double> epoch_losses;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// Continues training the base checkpoint on the line file: standard packing
// (concatenate, chunk into block_size windows), 80/10/10 masking at
// mask_probability, exactly `epochs` passes. The checkpoint is written
// atomically under out_dir/checkpoint, the manifest as out_dir/manifest.json.
RunManifest run_mlm_transfer(const MlmConfig& config, const std::vector<std::string>& lines,
                             const fs::path& out_dir);

RunManifest read_manifest(const fs::path& path);

// Losses from different tokenizers are not comparable; throws unless both
// runs share a tokenizer identity. Returns loss(a) - loss(b).
double compare_mlm_losses(const RunManifest& a, const RunManifest& b);

}  // namespace stylos::mlm
