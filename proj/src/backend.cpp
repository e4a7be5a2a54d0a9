#include "stylos/backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "stylos/common.hpp"
#include "stylos/hash.hpp"
#include "stylos/io.hpp"

namespace stylos::model {

using nlohmann::json;

std::vector<std::vector<double>> ClassifierModel::predict_proba_batch(
    const std::vector<std::string>& sentences) const {
  std::vector<std::vector<double>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(predict_proba(s));
  return out;
}

void save_checkpoint(const fs::path& dir, const json& state) {
  io::ensure_dir(dir);
  std::vector<uint8_t> bytes = json::to_msgpack(state);
  io::write_file_atomic(dir / "model.mpk",
                        std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

json load_checkpoint(const fs::path& dir) {
  fs::path file = dir / "model.mpk";
  if (!fs::exists(file)) throw ConfigError("checkpoint unavailable: " + file.string());
  std::string bytes = io::read_file(file);
  json state = json::from_msgpack(bytes, true, false);
  if (state.is_discarded()) throw BackendError("corrupt checkpoint: " + file.string());
  return state;
}

namespace detail {

bool is_external_spec(const std::string& spec) { return spec.rfind("external:", 0) == 0; }

std::string external_tool(const std::string& spec) { return spec.substr(std::string("external:").size()); }

std::string shell_quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

json run_external_stage(const std::string& tool, const std::vector<std::string>& args,
                        const fs::path& result_json) {
  std::string cmd = shell_quote(tool);
  for (const auto& a : args) {
    cmd.push_back(' ');
    cmd += shell_quote(a);
  }
  int rc = std::system(cmd.c_str());
  if (rc != 0) {
    throw BackendError("external model tool failed (exit " + std::to_string(rc) + "): " + tool);
  }
  if (!fs::exists(result_json)) {
    throw BackendError("external model tool wrote no result file: " + result_json.string());
  }
  return json::parse(io::read_file(result_json));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stub classifier: no learning, deterministic pseudo-probabilities. Useful
// for exercising pipeline plumbing without training time.

namespace {

class StubClassifier : public ClassifierModel {
 public:
  explicit StubClassifier(std::vector<std::string> classes) : classes_(std::move(classes)) {
    if (classes_.empty()) throw ConfigError("stub classifier needs at least one class");
  }

  std::string kind() const override { return "stub"; }
  const std::vector<std::string>& classes() const override { return classes_; }

  std::vector<double> predict_proba(std::string_view sentence) const override {
    std::vector<double> scores(classes_.size());
    for (size_t i = 0; i < classes_.size(); ++i) {
      std::string key = std::string(sentence) + "\x1f" + classes_[i];
      std::string h = hash::sha256_hex(key);
      uint64_t bits = std::stoull(h.substr(0, 16), nullptr, 16);
      scores[i] = 4.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53);
    }
    double max = *std::max_element(scores.begin(), scores.end());
    double sum = 0;
    for (double& s : scores) {
      s = std::exp(s - max);
      sum += s;
    }
    for (double& s : scores) s /= sum;
    return scores;
  }

  void save(const fs::path& dir) const override {
    save_checkpoint(dir, json{{"format", "stylos-checkpoint/1"},
                              {"kind", "stub"},
                              {"classes", classes_}});
  }

 private:
  std::vector<std::string> classes_;
};

// ---------------------------------------------------------------------------
// External classifier: predictions delegated to a model runtime outside this
// process (how a GPU-backed encoder plugs into the pipeline).

class ExternalClassifier : public ClassifierModel {
 public:
  ExternalClassifier(std::string tool, fs::path model_dir, std::vector<std::string> classes)
      : tool_(std::move(tool)), dir_(std::move(model_dir)), classes_(std::move(classes)) {}

  std::string kind() const override { return "external"; }
  const std::vector<std::string>& classes() const override { return classes_; }

  std::vector<double> predict_proba(std::string_view sentence) const override {
    return predict_proba_batch({std::string(sentence)})[0];
  }

  std::vector<std::vector<double>> predict_proba_batch(
      const std::vector<std::string>& sentences) const override {
    fs::path work = dir_ / "predict.tmp";
    io::ensure_dir(work);
    fs::path in = work / "sentences.txt";
    fs::path out = work / "probs.jsonl";
    std::error_code ec;
    fs::remove(out, ec);
    std::ostringstream buf;
    for (const auto& s : sentences) buf << s << '\n';
    io::write_file_atomic(in, buf.str());
    detail::run_external_stage(
        tool_, {"predict", "--model", dir_.string(), "--in", in.string(), "--out", out.string()},
        out);
    std::vector<std::vector<double>> probs;
    for (const auto& line : io::read_lines(out)) {
      if (line.empty()) continue;
      json row = json::parse(line);
      probs.push_back(row.get<std::vector<double>>());
      if (probs.back().size() != classes_.size()) {
        throw BackendError("external tool returned a probability vector of wrong size");
      }
    }
    if (probs.size() != sentences.size()) {
      throw BackendError("external tool returned " + std::to_string(probs.size()) +
                         " predictions for " + std::to_string(sentences.size()) + " sentences");
    }
    return probs;
  }

  void save(const fs::path& dir) const override {
    if (fs::equivalent(dir, dir_)) return;
    io::ensure_dir(dir);
    fs::copy(dir_, dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  }

 private:
  std::string tool_;
  fs::path dir_;
  std::vector<std::string> classes_;
};

void write_external_meta(const fs::path& dir, const std::string& tool,
                         const std::vector<std::string>& classes) {
  json meta{{"kind", "external"}, {"tool", tool}, {"classes", classes}};
  io::write_file_atomic(dir / "backend.json", meta.dump(2) + "\n");
}

}  // namespace

// Implemented in tiny_backend.cpp.
std::unique_ptr<ClassifierModel> train_tiny_classifier(
    const std::string& encoder_spec, const std::vector<std::string>& classes,
    const std::vector<LabeledExample>& train, const std::vector<LabeledExample>& val,
    const ClassifierTrainParams& params, const json& options, std::vector<EpochLog>* log);
std::unique_ptr<ClassifierModel> load_tiny_classifier(const json& state);

std::unique_ptr<ClassifierModel> train_classifier_backend(
    const std::string& encoder_spec, const std::vector<std::string>& classes,
    const std::vector<LabeledExample>& train, const std::vector<LabeledExample>& val,
    const ClassifierTrainParams& params, const json& options, std::vector<EpochLog>* log) {
  if (train.empty()) throw DataError("classifier training set is empty");
  if (encoder_spec == "stub") {
    auto model = std::make_unique<StubClassifier>(classes);
    if (log) {
      long hits = 0;
      for (const auto& ex : val) {
        auto p = model->predict_proba(ex.sentence);
        int arg = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
        if (arg == ex.label) ++hits;
      }
      double acc = val.empty() ? 0.0 : static_cast<double>(hits) / val.size();
      for (int e = 1; e <= params.epochs; ++e) log->push_back({e, 0.0, acc});
    }
    return model;
  }
  if (detail::is_external_spec(encoder_spec)) {
    std::string tool = detail::external_tool(encoder_spec);
    fs::path work = options.contains("work_dir")
                        ? fs::path(options.at("work_dir").get<std::string>())
                        : fs::temp_directory_path() / "stylos-external-train";
    io::ensure_dir(work);
    auto dump_examples = [&](const std::vector<LabeledExample>& examples, const fs::path& path) {
      std::ostringstream buf;
      for (const auto& ex : examples) {
        buf << json{{"sentence", ex.sentence}, {"label", classes.at(ex.label)}}.dump() << '\n';
      }
      io::write_file_atomic(path, buf.str());
    };
    dump_examples(train, work / "train.jsonl");
    dump_examples(val, work / "val.jsonl");
    json cfg{{"classes", classes},
             {"epochs", params.epochs},
             {"learning_rate", params.learning_rate},
             {"adam_epsilon", params.adam_epsilon},
             {"weight_decay", params.weight_decay},
             {"batch_size", params.batch_size},
             {"max_seq_len", params.max_seq_len},
             {"seed", params.seed}};
    io::write_file_atomic(work / "config.json", cfg.dump(2) + "\n");
    json result = detail::run_external_stage(
        tool,
        {"train-classifier", "--config", (work / "config.json").string(), "--train",
         (work / "train.jsonl").string(), "--val", (work / "val.jsonl").string(), "--out",
         work.string()},
        work / "result.json");
    if (log && result.contains("log")) {
      for (const auto& e : result.at("log")) {
        log->push_back({e.value("epoch", 0), e.value("train_loss", 0.0),
                        e.value("val_accuracy", 0.0)});
      }
    }
    write_external_meta(work, tool, classes);
    return std::make_unique<ExternalClassifier>(tool, work, classes);
  }
  return train_tiny_classifier(encoder_spec, classes, train, val, params, options, log);
}

std::unique_ptr<ClassifierModel> load_classifier(const fs::path& dir) {
  if (fs::exists(dir / "backend.json")) {
    json meta = json::parse(io::read_file(dir / "backend.json"));
    if (meta.value("kind", "") == "external") {
      return std::make_unique<ExternalClassifier>(
          meta.at("tool").get<std::string>(), dir,
          meta.at("classes").get<std::vector<std::string>>());
    }
  }
  json state = load_checkpoint(dir);
  std::string kind = state.value("kind", "");
  if (kind == "stub") {
    return std::make_unique<StubClassifier>(state.at("classes").get<std::vector<std::string>>());
  }
  if (kind == "tiny-classifier") return load_tiny_classifier(state);
  throw ConfigError("not a classifier checkpoint: " + dir.string() + " (kind '" + kind + "')");
}

}  // namespace stylos::model
