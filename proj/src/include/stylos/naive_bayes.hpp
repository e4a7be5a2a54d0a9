#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylos/backend.hpp"
#include "stylos/dataset.hpp"

namespace stylos::nb {

enum class Variant { bernoulli, multinomial };

struct NaiveBayesConfig {
  int vocab_size = 2000;  // N most frequent unigrams of the training split
  double alpha = 1.0;     // additive smoothing
  Variant variant = Variant::bernoulli;
};

// Unigrams are whitespace words with leading/trailing punctuation stripped.
std::vector<std::string> unigrams(std::string_view sentence);

class NaiveBayesModel {
 public:
  static NaiveBayesModel train(const dataset::LabeledDataset& data,
                               const NaiveBayesConfig& config = {});
  static NaiveBayesModel train(const std::vector<model::LabeledExample>& examples,
                               const std::vector<std::string>& classes,
                               const NaiveBayesConfig& config);

  // Normalized log-posterior over classes, in schema class order.
  std::vector<double> predict_log_proba(std::string_view sentence) const;
  std::vector<double> predict_proba(std::string_view sentence) const;
  int predict(std::string_view sentence) const;  // argmax; ties -> lowest index

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const NaiveBayesConfig& config() const { return config_; }

  void save(const std::filesystem::path& path) const;
  static NaiveBayesModel load(const std::filesystem::path& path);

 private:
  NaiveBayesConfig config_;
  std::vector<std::string> classes_;
  std::vector<std::string> vocabulary_;  // count desc, lexicographic ties
  std::unordered_map<std::string, int> vocab_index_;
  std::vector<double> log_prior_;        // per class
  // bernoulli: log P(word present | class) and log P(absent | class)
  // multinomial: log P(word | class), plus log P(unseen-in-vocab) unused
  std::vector<std::vector<double>> log_present_;
  std::vector<std::vector<double>> log_absent_;
};

}  // namespace stylos::nb
