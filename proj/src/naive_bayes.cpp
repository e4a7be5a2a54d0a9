#include "stylos/naive_bayes.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "stylos/common.hpp"
#include "stylos/io.hpp"
#include "stylos/unicode.hpp"

namespace stylos::nb {

using nlohmann::json;

std::vector<std::string> unigrams(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto word : uni::split_words(sentence)) {
    std::u32string cps = uni::decode_utf8(word);
    size_t begin = 0, end = cps.size();
    while (begin < end && u_ispunct(static_cast<UChar32>(cps[begin]))) ++begin;
    while (end > begin && u_ispunct(static_cast<UChar32>(cps[end - 1]))) --end;
    if (begin < end) out.push_back(uni::encode_utf8(std::u32string_view(cps).substr(begin, end - begin)));
  }
  return out;
}

NaiveBayesModel NaiveBayesModel::train(const dataset::LabeledDataset& data,
                                       const NaiveBayesConfig& config) {
  std::vector<model::LabeledExample> examples;
  for (const auto& ex : data.examples) {
    if (ex.split != dataset::Split::train) continue;
    int label = data.schema.index_of(ex.label);
    if (label < 0) throw DataError("naive bayes: example label outside schema: " + ex.label);
    examples.push_back({ex.sentence, label});
  }
  return train(examples, data.schema.classes, config);
}

NaiveBayesModel NaiveBayesModel::train(const std::vector<model::LabeledExample>& examples,
                                       const std::vector<std::string>& classes,
                                       const NaiveBayesConfig& config) {
  if (examples.empty()) throw DataError("naive bayes: empty training set");
  if (classes.empty()) throw ConfigError("naive bayes: no classes");
  if (config.vocab_size < 1) throw ConfigError("naive bayes: vocab_size must be >= 1");

  const size_t c = classes.size();
  NaiveBayesModel model;
  model.config_ = config;
  model.classes_ = classes;

  // vocabulary from the training split only
  std::map<std::string, long> totals;
  std::vector<std::vector<std::string>> tokenized(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    tokenized[i] = unigrams(examples[i].sentence);
    for (const auto& w : tokenized[i]) ++totals[w];
  }
  std::vector<std::pair<std::string, long>> ranked(totals.begin(), totals.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [word, count] : ranked) {
    if (model.vocabulary_.size() >= static_cast<size_t>(config.vocab_size)) break;
    model.vocab_index_[word] = static_cast<int>(model.vocabulary_.size());
    model.vocabulary_.push_back(word);
  }
  const size_t v = model.vocabulary_.size();

  std::vector<long> class_count(c, 0);
  for (const auto& ex : examples) {
    if (ex.label < 0 || static_cast<size_t>(ex.label) >= c) {
      throw DataError("naive bayes: label index out of range");
    }
    ++class_count[static_cast<size_t>(ex.label)];
  }
  model.log_prior_.resize(c);
  for (size_t k = 0; k < c; ++k) {
    model.log_prior_[k] =
        class_count[k] > 0
            ? std::log(static_cast<double>(class_count[k]) / static_cast<double>(examples.size()))
            : -1e300;
  }

  model.log_present_.assign(c, std::vector<double>(v, 0.0));
  model.log_absent_.assign(c, std::vector<double>(v, 0.0));
  const double alpha = config.alpha;

  if (config.variant == Variant::bernoulli) {
    // presence counts: sentences of class k containing vocabulary word w
    std::vector<std::vector<long>> present(c, std::vector<long>(v, 0));
    for (size_t i = 0; i < examples.size(); ++i) {
      std::unordered_set<int> seen;
      for (const auto& w : tokenized[i]) {
        auto it = model.vocab_index_.find(w);
        if (it != model.vocab_index_.end()) seen.insert(it->second);
      }
      for (int w : seen) ++present[static_cast<size_t>(examples[i].label)][static_cast<size_t>(w)];
    }
    for (size_t k = 0; k < c; ++k) {
      double denom = static_cast<double>(class_count[k]) + 2.0 * alpha;
      for (size_t w = 0; w < v; ++w) {
        double p = (static_cast<double>(present[k][w]) + alpha) / denom;
        model.log_present_[k][w] = std::log(p);
        model.log_absent_[k][w] = std::log1p(-p);
      }
    }
  } else {
    std::vector<std::vector<long>> counts(c, std::vector<long>(v, 0));
    std::vector<long> total(c, 0);
    for (size_t i = 0; i < examples.size(); ++i) {
      for (const auto& w : tokenized[i]) {
        auto it = model.vocab_index_.find(w);
        if (it == model.vocab_index_.end()) continue;
        ++counts[static_cast<size_t>(examples[i].label)][static_cast<size_t>(it->second)];
        ++total[static_cast<size_t>(examples[i].label)];
      }
    }
    for (size_t k = 0; k < c; ++k) {
      double denom = static_cast<double>(total[k]) + alpha * static_cast<double>(v);
      for (size_t w = 0; w < v; ++w) {
        model.log_present_[k][w] = std::log((static_cast<double>(counts[k][w]) + alpha) / denom);
      }
    }
  }
  return model;
}

std::vector<double> NaiveBayesModel::predict_log_proba(std::string_view sentence) const {
  const size_t c = classes_.size();
  const size_t v = vocabulary_.size();
  std::vector<double> scores(c);

  if (config_.variant == Variant::bernoulli) {
    std::unordered_set<int> present;
    for (const auto& w : unigrams(sentence)) {
      auto it = vocab_index_.find(w);
      if (it != vocab_index_.end()) present.insert(it->second);
    }
    for (size_t k = 0; k < c; ++k) {
      double s = log_prior_[k];
      for (size_t w = 0; w < v; ++w) {
        s += present.count(static_cast<int>(w)) ? log_present_[k][w] : log_absent_[k][w];
      }
      scores[k] = s;
    }
  } else {
    std::map<int, long> tf;
    for (const auto& w : unigrams(sentence)) {
      auto it = vocab_index_.find(w);
      if (it != vocab_index_.end()) ++tf[it->second];
    }
    for (size_t k = 0; k < c; ++k) {
      double s = log_prior_[k];
      for (const auto& [w, count] : tf) {
        s += static_cast<double>(count) * log_present_[k][static_cast<size_t>(w)];
      }
      scores[k] = s;
    }
  }

  double max = *std::max_element(scores.begin(), scores.end());
  double lse = 0;
  for (double s : scores) lse += std::exp(s - max);
  lse = max + std::log(lse);
  for (double& s : scores) s -= lse;
  return scores;
}

std::vector<double> NaiveBayesModel::predict_proba(std::string_view sentence) const {
  std::vector<double> p = predict_log_proba(sentence);
  for (double& x : p) x = std::exp(x);
  return p;
}

int NaiveBayesModel::predict(std::string_view sentence) const {
  std::vector<double> p = predict_log_proba(sentence);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

void NaiveBayesModel::save(const std::filesystem::path& path) const {
  json state{{"format", "stylos-nb/1"},
             {"variant", config_.variant == Variant::bernoulli ? "bernoulli" : "multinomial"},
             {"vocab_size", config_.vocab_size},
             {"alpha", config_.alpha},
             {"classes", classes_},
             {"vocabulary", vocabulary_},
             {"log_prior", log_prior_},
             {"log_present", log_present_},
             {"log_absent", log_absent_}};
  std::vector<uint8_t> bytes = json::to_msgpack(state);
  io::write_file_atomic(path,
                        std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

NaiveBayesModel NaiveBayesModel::load(const std::filesystem::path& path) {
  json state = json::from_msgpack(io::read_file(path));
  NaiveBayesModel model;
  model.config_.variant =
      state.value("variant", "bernoulli") == "multinomial" ? Variant::multinomial
                                                           : Variant::bernoulli;
  model.config_.vocab_size = state.value("vocab_size", 2000);
  model.config_.alpha = state.value("alpha", 1.0);
  model.classes_ = state.at("classes").get<std::vector<std::string>>();
  model.vocabulary_ = state.at("vocabulary").get<std::vector<std::string>>();
  model.log_prior_ = state.at("log_prior").get<std::vector<double>>();
  model.log_present_ = state.at("log_present").get<std::vector<std::vector<double>>>();
  model.log_absent_ = state.at("log_absent").get<std::vector<std::vector<double>>>();
  for (size_t i = 0; i < model.vocabulary_.size(); ++i) {
    model.vocab_index_[model.vocabulary_[i]] = static_cast<int>(i);
  }
  return model;
}

}  // namespace stylos::nb
