#include "stylos/mlm.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>

#include "stylos/backend.hpp"
#include "stylos/common.hpp"
#include "stylos/hash.hpp"
#include "stylos/io.hpp"
#include "stylos/rng.hpp"

namespace stylos::mlm {

using nlohmann::json;

void MlmConfig::validate() const {
  if (learning_rate <= 0) throw ConfigError("mlm: learning_rate must be > 0");
  if (block_size < 2) throw ConfigError("mlm: block_size must be >= 2");
  if (epochs < 1) throw ConfigError("mlm: epochs must be >= 1");
  if (mask_probability <= 0 || mask_probability >= 1) {
    throw ConfigError("mlm: mask_probability must be in (0, 1)");
  }
  if (batch_size < 1) throw ConfigError("mlm: batch_size must be >= 1");
}

json MlmConfig::to_json() const {
  return json{{"base_checkpoint", base_checkpoint},
              {"learning_rate", learning_rate},
              {"block_size", block_size},
              {"epochs", epochs},
              {"mask_probability", mask_probability},
              {"seed", seed},
              {"batch_size", batch_size},
              {"embed_dim", embed_dim},
              {"max_vocab", max_vocab}};
}

MlmConfig MlmConfig::from_json(const json& j) {
  MlmConfig c;
  c.base_checkpoint = j.value("base_checkpoint", c.base_checkpoint);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.block_size = j.value("block_size", c.block_size);
  c.epochs = j.value("epochs", c.epochs);
  c.mask_probability = j.value("mask_probability", c.mask_probability);
  c.seed = j.value("seed", c.seed);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.max_vocab = j.value("max_vocab", c.max_vocab);
  return c;
}

std::vector<std::string> prepare_mlm_lines(
    const std::vector<ingest::NormalizedDocument>& corpus) {
  std::vector<const ingest::NormalizedDocument*> docs;
  docs.reserve(corpus.size());
  for (const auto& d : corpus) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(),
            [](const auto* a, const auto* b) { return a->doc_id < b->doc_id; });
  std::vector<std::string> lines;
  for (const auto* doc : docs) {
    for (const auto& s : doc->sentences) lines.push_back(s.text);
  }
  if (lines.empty()) throw DataError("empty corpus: no sentences to prepare for MLM");
  return lines;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ostringstream buf;
  for (const auto& line : lines) buf << line << '\n';
  io::write_file_atomic(path, buf.str());
}

json RunManifest::to_json() const {
  return json{{"config", config.to_json()},
              {"corpus_fingerprint", corpus_fingerprint},
              {"line_count", line_count},
              {"final_loss", final_loss},
              {"wall_time_seconds", wall_time_seconds},
              {"checkpoint_path", checkpoint_path},
              {"tokenizer_id", tokenizer_id},
              {"epoch_losses", epoch_losses}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.config = MlmConfig::from_json(j.at("config"));
  m.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
  m.line_count = j.at("line_count").get<long>();
  m.final_loss = j.at("final_loss").get<double>();
  m.wall_time_seconds = j.value("wall_time_seconds", 0.0);
  m.checkpoint_path = j.at("checkpoint_path").get<std::string>();
  m.tokenizer_id = j.at("tokenizer_id").get<std::string>();
  m.epoch_losses = j.value("epoch_losses", std::vector<double>{});
  return m;
}

RunManifest read_manifest(const fs::path& path) {
  return RunManifest::from_json(json::parse(io::read_file(path)));
}

namespace {

std::string fingerprint_lines(const std::vector<std::string>& lines) {
  hash::Sha256 h;
  for (const auto& line : lines) {
    h.update(line);
    h.update(std::string_view("\n", 1));
  }
  return h.hex();
}

// Standard MLM corruption: each position is selected with mask_probability
// (at least one per block); of the selected, 80% become [MASK], 10% a random
// token, 10% stay unchanged. Labels hold the original id at selected
// positions, -1 elsewhere.
void mask_block(const std::vector<int32_t>& block, double mask_probability, Rng& rng,
                int32_t mask_id, int32_t first_content_id, long vocab_size,
                std::vector<int32_t>& input, std::vector<int32_t>& labels) {
  input = block;
  labels.assign(block.size(), -1);
  std::vector<size_t> selected;
  for (size_t i = 0; i < block.size(); ++i) {
    if (rng.uniform01() < mask_probability) selected.push_back(i);
  }
  if (selected.empty()) selected.push_back(static_cast<size_t>(rng.bounded(block.size())));
  for (size_t i : selected) {
    labels[i] = block[i];
    double roll = rng.uniform01();
    if (roll < 0.8) {
      input[i] = mask_id;
    } else if (roll < 0.9) {
      long span = vocab_size - first_content_id;
      if (span > 0) input[i] = first_content_id + static_cast<int32_t>(rng.bounded(span));
    }  // else keep the original token
  }
}

RunManifest run_external_mlm(const MlmConfig& config, const std::vector<std::string>& lines,
                             const fs::path& out_dir, const std::string& fingerprint);

}  // namespace

RunManifest run_mlm_transfer(const MlmConfig& config, const std::vector<std::string>& lines,
                             const fs::path& out_dir) {
  config.validate();
  if (lines.empty()) throw DataError("empty MLM line file; nothing to train on");
  std::string fingerprint = fingerprint_lines(lines);
  if (config.base_checkpoint.rfind("external:", 0) == 0) {
    return run_external_mlm(config, lines, out_dir, fingerprint);
  }

  auto start = std::chrono::steady_clock::now();
  json options{{"embed_dim", config.embed_dim}, {"max_vocab", config.max_vocab}};
  std::unique_ptr<model::MlmBackend> backend =
      model::make_mlm_backend(config.base_checkpoint, lines, options, config.seed);

  // chunked packing: concatenate token streams, cut block_size windows
  std::vector<int32_t> stream;
  for (const auto& line : lines) {
    auto ids = backend->encode_line(line);
    stream.insert(stream.end(), ids.begin(), ids.end());
  }
  if (stream.size() < 2) throw DataError("MLM corpus has fewer than 2 tokens after encoding");
  std::vector<std::vector<int32_t>> blocks;
  size_t block = static_cast<size_t>(config.block_size);
  for (size_t i = 0; i + 1 < stream.size(); i += block) {
    size_t end = std::min(stream.size(), i + block);
    if (end - i < 2) break;  // remainder too short to predict from context
    blocks.emplace_back(stream.begin() + static_cast<long>(i), stream.begin() + static_cast<long>(end));
  }

  long steps_per_epoch =
      (static_cast<long>(blocks.size()) + config.batch_size - 1) / config.batch_size;
  model::MlmTrainParams params;
  params.learning_rate = config.learning_rate;
  backend->begin_training(steps_per_epoch * config.epochs, params);

  std::vector<double> epoch_losses;
  std::vector<size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), size_t{0});
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, "mlm-epoch-" + std::to_string(epoch)));
    rng.shuffle(order);
    double loss_sum = 0;
    long steps = 0;
    for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(config.batch_size)) {
      size_t end = std::min(order.size(), begin + static_cast<size_t>(config.batch_size));
      model::MaskedBatch batch;
      batch.inputs.resize(end - begin);
      batch.labels.resize(end - begin);
      for (size_t k = begin; k < end; ++k) {
        mask_block(blocks[order[k]], config.mask_probability, rng, backend->mask_id(),
                   backend->first_content_id(), backend->vocab_size(), batch.inputs[k - begin],
                   batch.labels[k - begin]);
      }
      loss_sum += backend->train_step(batch);
      ++steps;
    }
    epoch_losses.push_back(steps ? loss_sum / steps : 0.0);
  }

  fs::path ckpt_dir = out_dir / "checkpoint";
  backend->save(ckpt_dir);

  RunManifest manifest;
  manifest.config = config;
  manifest.corpus_fingerprint = fingerprint;
  manifest.line_count = static_cast<long>(lines.size());
  manifest.final_loss = epoch_losses.back();
  manifest.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.checkpoint_path = ckpt_dir.string();
  manifest.tokenizer_id = backend->tokenizer_id();
  manifest.epoch_losses = epoch_losses;
  io::write_file_atomic(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

namespace {

RunManifest run_external_mlm(const MlmConfig& config, const std::vector<std::string>& lines,
                             const fs::path& out_dir, const std::string& fingerprint) {
  auto start = std::chrono::steady_clock::now();
  std::string tool = config.base_checkpoint.substr(std::string("external:").size());
  io::ensure_dir(out_dir);
  fs::path lines_path = out_dir / "mlm_lines.txt";
  write_lines(lines_path, lines);
  fs::path cfg_path = out_dir / "mlm_config.json";
  io::write_file_atomic(cfg_path, config.to_json().dump(2) + "\n");
  fs::path ckpt_dir = out_dir / "checkpoint";
  io::ensure_dir(ckpt_dir);
  json result = model::detail::run_external_stage(
      tool,
      {"mlm-train", "--config", cfg_path.string(), "--lines", lines_path.string(), "--out",
       ckpt_dir.string()},
      ckpt_dir / "result.json");

  RunManifest manifest;
  manifest.config = config;
  manifest.corpus_fingerprint = fingerprint;
  manifest.line_count = static_cast<long>(lines.size());
  manifest.final_loss = result.at("final_loss").get<double>();
  manifest.tokenizer_id = result.at("tokenizer_id").get<std::string>();
  manifest.epoch_losses = result.value("epoch_losses", std::vector<double>{manifest.final_loss});
  manifest.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.checkpoint_path = ckpt_dir.string();
  io::write_file_atomic(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace

double compare_mlm_losses(const RunManifest& a, const RunManifest& b) {
  if (a.tokenizer_id != b.tokenizer_id) {
    throw ConfigError("MLM losses are not comparable across tokenizers: '" + a.tokenizer_id +
                      "' vs '" + b.tokenizer_id + "'");
  }
  return a.final_loss - b.final_loss;
}

}  // namespace stylos::mlm
