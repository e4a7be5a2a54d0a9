#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylos/backend.hpp"
#include "stylos/dataset.hpp"
#include "stylos/naive_bayes.hpp"

namespace stylos::classifier {

namespace fs = std::filesystem;

struct ClassifierConfig {
  std::string encoder_checkpoint = "tiny";  // post-MLM checkpoint dir or base backend spec
  int epochs = 10;
  double learning_rate = 2e-5;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.01;
  int batch_size = 32;
  int max_seq_len = 128;
  int embed_dim = 32;
  long max_vocab = 50000;
  uint64_t seed = 0;
  bool allow_split_overlap = false;  // duplicate text across splits aborts training unless set

  void validate() const;
  nlohmann::json to_json() const;
  static ClassifierConfig from_json(const nlohmann::json& j);
};

struct TrainOutput {
  std::unique_ptr<model::ClassifierModel> model;
  std::vector<model::EpochLog> log;
  fs::path model_dir;
};

// Fine-tunes a sentence classifier on the dataset's TRAIN split, evaluating
// on VALIDATION after each epoch. Saves the checkpoint plus a training log
// under out_dir.
TrainOutput train_classifier(const ClassifierConfig& config,
                             const dataset::LabeledDataset& data, const fs::path& out_dir);

struct EvaluationReport {
  std::string task;
  std::vector<std::string> classes;
  double accuracy = 0;                       // trace / total, exactly
  std::vector<std::vector<long>> confusion;  // [true][predicted]
  std::vector<long> per_class_counts;        // row sums
  std::map<std::string, double> baselines;   // "naive_bayes", "random" when computed
  long leaked_validation_count = 0;          // validation texts also present in TRAIN
  std::string tie_break = "lowest-class-index";

  nlohmann::json to_json() const;
  std::string confusion_csv() const;
};

// Confusion counts over the VALIDATION split. Errors when the validation
// split is empty or the model head does not match the dataset schema.
EvaluationReport evaluate(const model::ClassifierModel& model,
                          const dataset::LabeledDataset& data);

EvaluationReport evaluate_naive_bayes(const nb::NaiveBayesModel& model,
                                      const dataset::LabeledDataset& data);

// Analytic expectation of uniform guessing.
double random_baseline(const dataset::LabelSchema& schema);

// Count of validation sentence hashes that also occur in the training split.
long split_overlap(const dataset::LabeledDataset& data);

}  // namespace stylos::classifier
