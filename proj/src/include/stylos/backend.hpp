#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace stylos::model {

namespace fs = std::filesystem;

// All tensor math lives behind these interfaces; the pipeline only does
// packing, masking, batching and bookkeeping. Backends:
//   "tiny"            in-process trainable bag-of-embeddings model
//   "stub"            deterministic hash-based probabilities, no learning
//   "external:<tool>" stage-level delegation to an external model runtime
//   <directory>       a saved checkpoint (self-describing)

struct MlmTrainParams {
  double learning_rate = 1e-4;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.01;
};

// Corrupted blocks plus label ids; label -1 = position not predicted.
struct MaskedBatch {
  std::vector<std::vector<int32_t>> inputs;
  std::vector<std::vector<int32_t>> labels;
};

class MlmBackend {
 public:
  virtual ~MlmBackend() = default;
  virtual std::string kind() const = 0;
  // Identity of the token vocabulary; losses are only comparable within one.
  virtual std::string tokenizer_id() const = 0;
  virtual long vocab_size() const = 0;
  virtual std::vector<int32_t> encode_line(std::string_view line) const = 0;
  virtual int32_t mask_id() const = 0;
  virtual int32_t first_content_id() const = 0;
  virtual void begin_training(long total_steps, const MlmTrainParams& params) = 0;
  virtual double train_step(const MaskedBatch& batch) = 0;  // mean masked cross-entropy
  virtual std::vector<int32_t> predict_masked(const std::vector<int32_t>& input,
                                              const std::vector<int>& positions) const = 0;
  virtual void save(const fs::path& dir) const = 0;
};

// Fresh backend for MLM training. Tiny builds its vocabulary from the lines;
// a checkpoint directory continues training from the saved state.
std::unique_ptr<MlmBackend> make_mlm_backend(const std::string& spec,
                                             const std::vector<std::string>& lines,
                                             const nlohmann::json& options, uint64_t seed);
std::unique_ptr<MlmBackend> load_mlm_backend(const fs::path& dir);

struct ClassifierTrainParams {
  int epochs = 10;
  double learning_rate = 2e-5;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.01;
  int batch_size = 32;
  int max_seq_len = 128;  // tokens kept from the left; rest truncated
  uint64_t seed = 0;
};

struct LabeledExample {
  std::string sentence;
  int label = 0;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0;
  double val_accuracy = 0;
};

class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;
  virtual std::string kind() const = 0;
  virtual const std::vector<std::string>& classes() const = 0;
  virtual std::vector<double> predict_proba(std::string_view sentence) const = 0;
  virtual std::vector<std::vector<double>> predict_proba_batch(
      const std::vector<std::string>& sentences) const;
  virtual void save(const fs::path& dir) const = 0;
};

// encoder_spec: "tiny" (fresh), a tiny MLM checkpoint directory (transfer:
// vocabulary and embeddings are loaded and fine-tuned), "stub", or
// "external:<tool>".
std::unique_ptr<ClassifierModel> train_classifier_backend(
    const std::string& encoder_spec, const std::vector<std::string>& classes,
    const std::vector<LabeledExample>& train, const std::vector<LabeledExample>& val,
    const ClassifierTrainParams& params, const nlohmann::json& options,
    std::vector<EpochLog>* log);

std::unique_ptr<ClassifierModel> load_classifier(const fs::path& dir);

// Checkpoint container helpers (MessagePack; doubles round-trip bit-exact).
void save_checkpoint(const fs::path& dir, const nlohmann::json& state);
nlohmann::json load_checkpoint(const fs::path& dir);

namespace detail {
// External tool protocol: the tool is invoked with a subcommand and file
// arguments and must write a JSON result file. Nonzero exit or a missing
// result file raises BackendError.
bool is_external_spec(const std::string& spec);
std::string external_tool(const std::string& spec);
nlohmann::json run_external_stage(const std::string& tool, const std::vector<std::string>& args,
                                  const fs::path& result_json);
}  // namespace detail

}  // namespace stylos::model
