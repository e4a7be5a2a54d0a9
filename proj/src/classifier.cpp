#include "stylos/classifier.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "stylos/common.hpp"
#include "stylos/csv.hpp"
#include "stylos/hash.hpp"
#include "stylos/io.hpp"

namespace stylos::classifier {

using nlohmann::json;

void ClassifierConfig::validate() const {
  if (epochs < 1) throw ConfigError("classifier: epochs must be >= 1");
  if (learning_rate <= 0) throw ConfigError("classifier: learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("classifier: batch_size must be >= 1");
  if (max_seq_len < 1) throw ConfigError("classifier: max_seq_len must be >= 1");
}

json ClassifierConfig::to_json() const {
  return json{{"encoder_checkpoint", encoder_checkpoint},
              {"epochs", epochs},
              {"learning_rate", learning_rate},
              {"adam_epsilon", adam_epsilon},
              {"weight_decay", weight_decay},
              {"batch_size", batch_size},
              {"max_seq_len", max_seq_len},
              {"embed_dim", embed_dim},
              {"max_vocab", max_vocab},
              {"seed", seed},
              {"allow_split_overlap", allow_split_overlap}};
}

ClassifierConfig ClassifierConfig::from_json(const json& j) {
  ClassifierConfig c;
  c.encoder_checkpoint = j.value("encoder_checkpoint", c.encoder_checkpoint);
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.max_vocab = j.value("max_vocab", c.max_vocab);
  c.seed = j.value("seed", c.seed);
  c.allow_split_overlap = j.value("allow_split_overlap", c.allow_split_overlap);
  return c;
}

long split_overlap(const dataset::LabeledDataset& data) {
  std::unordered_set<std::string> train_hashes;
  for (const auto& ex : data.examples) {
    if (ex.split == dataset::Split::train) train_hashes.insert(hash::sha256_hex(ex.sentence));
  }
  long leaked = 0;
  for (const auto& ex : data.examples) {
    if (ex.split == dataset::Split::validation &&
        train_hashes.count(hash::sha256_hex(ex.sentence))) {
      ++leaked;
    }
  }
  return leaked;
}

namespace {

std::vector<model::LabeledExample> to_examples(const dataset::LabeledDataset& data,
                                               dataset::Split split) {
  std::vector<model::LabeledExample> out;
  for (const auto& ex : data.examples) {
    if (ex.split != split) continue;
    int label = data.schema.index_of(ex.label);
    if (label < 0) throw DataError("example label outside schema: " + ex.label);
    out.push_back({ex.sentence, label});
  }
  return out;
}

}  // namespace

TrainOutput train_classifier(const ClassifierConfig& config, const dataset::LabeledDataset& data,
                             const fs::path& out_dir) {
  config.validate();
  data.schema.validate();

  long leaked = split_overlap(data);
  if (leaked > 0 && !config.allow_split_overlap) {
    throw DataError("validation isolation violated: " + std::to_string(leaked) +
                    " validation sentence(s) also appear in the training split");
  }

  auto train_split = to_examples(data, dataset::Split::train);
  auto val_split = to_examples(data, dataset::Split::validation);

  model::ClassifierTrainParams params;
  params.epochs = config.epochs;
  params.learning_rate = config.learning_rate;
  params.adam_epsilon = config.adam_epsilon;
  params.weight_decay = config.weight_decay;
  params.batch_size = config.batch_size;
  params.max_seq_len = config.max_seq_len;
  params.seed = config.seed;

  TrainOutput out;
  out.model_dir = out_dir / "model";
  json options{{"embed_dim", config.embed_dim},
               {"max_vocab", config.max_vocab},
               {"work_dir", out.model_dir.string()}};
  out.model = model::train_classifier_backend(config.encoder_checkpoint, data.schema.classes,
                                              train_split, val_split, params, options, &out.log);
  out.model->save(out.model_dir);

  json log = json::array();
  for (const auto& e : out.log) {
    log.push_back(
        {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_accuracy", e.val_accuracy}});
  }
  json summary{{"config", config.to_json()},
               {"classes", data.schema.classes},
               {"dataset_hash", data.content_hash()},
               {"leaked_validation_count", leaked},
               {"log", log}};
  io::write_file_atomic(out_dir / "train_log.json", summary.dump(2) + "\n");
  return out;
}

json EvaluationReport::to_json() const {
  return json{{"task", task},
              {"classes", classes},
              {"accuracy", accuracy},
              {"confusion", confusion},
              {"per_class_counts", per_class_counts},
              {"baselines", baselines},
              {"leaked_validation_count", leaked_validation_count},
              {"tie_break", tie_break}};
}

std::string EvaluationReport::confusion_csv() const {
  std::ostringstream out;
  csv::Row header{"true\\predicted"};
  header.insert(header.end(), classes.begin(), classes.end());
  out << csv::format_row(header);
  for (size_t i = 0; i < confusion.size(); ++i) {
    csv::Row row{classes[i]};
    for (long v : confusion[i]) row.push_back(std::to_string(v));
    out << csv::format_row(row);
  }
  return out.str();
}

namespace {

EvaluationReport evaluate_with(const dataset::LabeledDataset& data,
                               const std::vector<std::string>& model_classes,
                               const std::function<std::vector<std::vector<double>>(
                                   const std::vector<std::string>&)>& predict_batch) {
  if (model_classes != data.schema.classes) {
    throw ConfigError("model head does not match dataset schema (" +
                      std::to_string(model_classes.size()) + " vs " +
                      std::to_string(data.schema.classes.size()) + " classes)");
  }
  std::vector<std::string> sentences;
  std::vector<int> labels;
  for (const auto& ex : data.examples) {
    if (ex.split != dataset::Split::validation) continue;
    int label = data.schema.index_of(ex.label);
    if (label < 0) throw DataError("example label outside schema: " + ex.label);
    sentences.push_back(ex.sentence);
    labels.push_back(label);
  }
  if (sentences.empty()) throw DataError("evaluation: empty validation split");

  const size_t c = data.schema.classes.size();
  EvaluationReport report;
  report.task = to_string(data.schema.task);
  report.classes = data.schema.classes;
  report.confusion.assign(c, std::vector<long>(c, 0));
  report.per_class_counts.assign(c, 0);

  auto probs = predict_batch(sentences);
  long correct = 0;
  for (size_t i = 0; i < sentences.size(); ++i) {
    const auto& p = probs[i];
    if (p.size() != c) throw BackendError("prediction vector size mismatch");
    int arg = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    ++report.confusion[static_cast<size_t>(labels[i])][static_cast<size_t>(arg)];
    ++report.per_class_counts[static_cast<size_t>(labels[i])];
    if (arg == labels[i]) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(sentences.size());
  report.leaked_validation_count = split_overlap(data);
  return report;
}

}  // namespace

EvaluationReport evaluate(const model::ClassifierModel& model,
                          const dataset::LabeledDataset& data) {
  return evaluate_with(data, model.classes(), [&](const std::vector<std::string>& sentences) {
    return model.predict_proba_batch(sentences);
  });
}

EvaluationReport evaluate_naive_bayes(const nb::NaiveBayesModel& model,
                                      const dataset::LabeledDataset& data) {
  return evaluate_with(data, model.classes(), [&](const std::vector<std::string>& sentences) {
    std::vector<std::vector<double>> probs;
    probs.reserve(sentences.size());
    for (const auto& s : sentences) probs.push_back(model.predict_proba(s));
    return probs;
  });
}

double random_baseline(const dataset::LabelSchema& schema) {
  if (schema.classes.empty()) throw ConfigError("random baseline: schema has no classes");
  return 1.0 / static_cast<double>(schema.classes.size());
}

}  // namespace stylos::classifier
