// In-process reference backend: bag-of-embeddings models small enough to
// train on CPU in tests, behind the same interfaces a full encoder runtime
// would implement. MLM variant predicts a held-out token from the mean of
// the other block embeddings; classifier variant is mean-pooled embeddings
// into a dense softmax head. Optimization is AdamW with a linear schedule.
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "stylos/backend.hpp"
#include "stylos/common.hpp"
#include "stylos/hash.hpp"
#include "stylos/rng.hpp"
#include "stylos/unicode.hpp"

namespace stylos::model {

using nlohmann::json;

namespace {

constexpr int32_t kPad = 0;
constexpr int32_t kUnk = 1;
constexpr int32_t kMask = 2;
constexpr int32_t kFirstContent = 3;

struct WordVocab {
  std::vector<std::string> words;  // id -> word
  std::unordered_map<std::string, int32_t> index;

  static WordVocab build(const std::vector<std::string>& lines, size_t max_size) {
    std::map<std::string, long> counts;
    for (const auto& line : lines) {
      for (auto w : uni::split_words(line)) ++counts[std::string(w)];
    }
    std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    WordVocab v;
    v.words = {"[PAD]", "[UNK]", "[MASK]"};
    for (const auto& [word, count] : ranked) {
      if (v.words.size() >= max_size) break;
      v.words.push_back(word);
    }
    v.reindex();
    return v;
  }

  void reindex() {
    index.clear();
    index.reserve(words.size() * 2);
    for (size_t i = 0; i < words.size(); ++i) index[words[i]] = static_cast<int32_t>(i);
  }

  int32_t get(std::string_view w) const {
    auto it = index.find(std::string(w));
    return it == index.end() ? kUnk : it->second;
  }

  std::string fingerprint() const {
    hash::Sha256 h;
    for (const auto& w : words) {
      h.update(w);
      h.update(std::string_view("\n", 1));
    }
    return h.hex().substr(0, 12);
  }
};

struct AdamW {
  std::vector<double> m, v;
  long t = 0;
  double eps = 1e-8;
  double wd = 0.01;

  void init(size_t n, double epsilon, double weight_decay) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    t = 0;
    eps = epsilon;
    wd = weight_decay;
  }

  void step(std::vector<double>& p, const std::vector<double>& g, double lr) {
    ++t;
    const double b1 = 0.9, b2 = 0.999;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      double update = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
      p[i] -= lr * (update + wd * p[i]);
    }
  }
};

void init_uniform(std::vector<double>& p, Rng& rng, double scale) {
  for (double& x : p) x = (2.0 * rng.uniform01() - 1.0) * scale;
}

void softmax_inplace(std::vector<double>& scores) {
  double max = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double& s : scores) {
    s = std::exp(s - max);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

// ---------------------------------------------------------------------------

class TinyMlm : public MlmBackend {
 public:
  TinyMlm(WordVocab vocab, int dim, uint64_t seed)
      : vocab_(std::move(vocab)), dim_(dim) {
    size_t v = vocab_.words.size();
    emb_.assign(v * dim_, 0.0);
    out_w_.assign(v * dim_, 0.0);
    out_b_.assign(v, 0.0);
    Rng rng(derive_seed(seed, "tiny-mlm-init"));
    init_uniform(emb_, rng, 0.05);
    init_uniform(out_w_, rng, 0.05);
  }

  explicit TinyMlm(const json& state) {
    vocab_.words = state.at("vocab").get<std::vector<std::string>>();
    vocab_.reindex();
    dim_ = state.at("dim").get<int>();
    emb_ = state.at("emb").get<std::vector<double>>();
    out_w_ = state.at("out_w").get<std::vector<double>>();
    out_b_ = state.at("out_b").get<std::vector<double>>();
    if (emb_.size() != vocab_.words.size() * static_cast<size_t>(dim_)) {
      throw BackendError("tiny MLM checkpoint has inconsistent shapes");
    }
  }

  std::string kind() const override { return "tiny-mlm"; }
  std::string tokenizer_id() const override { return "tiny-word/" + vocab_.fingerprint(); }
  long vocab_size() const override { return static_cast<long>(vocab_.words.size()); }
  int32_t mask_id() const override { return kMask; }
  int32_t first_content_id() const override { return kFirstContent; }

  std::vector<int32_t> encode_line(std::string_view line) const override {
    std::vector<int32_t> ids;
    for (auto w : uni::split_words(line)) ids.push_back(vocab_.get(w));
    return ids;
  }

  void begin_training(long total_steps, const MlmTrainParams& params) override {
    params_ = params;
    total_steps_ = std::max<long>(total_steps, 1);
    step_ = 0;
    adam_emb_.init(emb_.size(), params.adam_epsilon, params.weight_decay);
    adam_w_.init(out_w_.size(), params.adam_epsilon, params.weight_decay);
    adam_b_.init(out_b_.size(), params.adam_epsilon, 0.0);
  }

  double train_step(const MaskedBatch& batch) override {
    const size_t v = vocab_.words.size();
    std::vector<double> g_emb(emb_.size(), 0.0);
    std::vector<double> g_w(out_w_.size(), 0.0);
    std::vector<double> g_b(out_b_.size(), 0.0);
    double loss_sum = 0;
    long predicted = 0;

    std::vector<double> ctx(dim_), scores(v), dctx(dim_);
    for (size_t bi = 0; bi < batch.inputs.size(); ++bi) {
      const auto& input = batch.inputs[bi];
      const auto& labels = batch.labels[bi];
      size_t n = input.size();
      if (n == 0) continue;
      std::vector<double> sum_emb(dim_, 0.0);
      for (int32_t id : input) {
        const double* row = &emb_[static_cast<size_t>(id) * dim_];
        for (int d = 0; d < dim_; ++d) sum_emb[d] += row[d];
      }
      for (size_t p = 0; p < n; ++p) {
        int32_t label = labels[p];
        if (label < 0) continue;
        forward_context(input, p, sum_emb, ctx);
        forward_scores(ctx, scores);
        softmax_inplace(scores);
        loss_sum += -std::log(std::max(scores[static_cast<size_t>(label)], 1e-300));
        ++predicted;
        // dscores = softmax - onehot
        scores[static_cast<size_t>(label)] -= 1.0;
        std::fill(dctx.begin(), dctx.end(), 0.0);
        for (size_t row = 0; row < v; ++row) {
          double ds = scores[row];
          if (ds == 0.0) continue;
          g_b[row] += ds;
          double* gw = &g_w[row * dim_];
          const double* w = &out_w_[row * dim_];
          for (int d = 0; d < dim_; ++d) {
            gw[d] += ds * ctx[d];
            dctx[d] += ds * w[d];
          }
        }
        if (n > 1) {
          double scale = 1.0 / static_cast<double>(n - 1);
          for (size_t j = 0; j < n; ++j) {
            if (j == p) continue;
            double* ge = &g_emb[static_cast<size_t>(input[j]) * dim_];
            for (int d = 0; d < dim_; ++d) ge[d] += dctx[d] * scale;
          }
        }
      }
    }
    if (predicted == 0) return 0.0;
    double inv = 1.0 / static_cast<double>(predicted);
    for (double& g : g_emb) g *= inv;
    for (double& g : g_w) g *= inv;
    for (double& g : g_b) g *= inv;
    double lr = params_.learning_rate *
                std::max(0.0, 1.0 - static_cast<double>(step_) / static_cast<double>(total_steps_));
    adam_emb_.step(emb_, g_emb, lr);
    adam_w_.step(out_w_, g_w, lr);
    adam_b_.step(out_b_, g_b, lr);
    ++step_;
    return loss_sum * inv;
  }

  std::vector<int32_t> predict_masked(const std::vector<int32_t>& input,
                                      const std::vector<int>& positions) const override {
    std::vector<double> sum_emb(dim_, 0.0);
    for (int32_t id : input) {
      const double* row = &emb_[static_cast<size_t>(id) * dim_];
      for (int d = 0; d < dim_; ++d) sum_emb[d] += row[d];
    }
    std::vector<int32_t> out;
    std::vector<double> ctx(dim_), scores(vocab_.words.size());
    for (int p : positions) {
      forward_context(input, static_cast<size_t>(p), sum_emb, ctx);
      forward_scores(ctx, scores);
      out.push_back(static_cast<int32_t>(
          std::max_element(scores.begin(), scores.end()) - scores.begin()));
    }
    return out;
  }

  void save(const fs::path& dir) const override {
    save_checkpoint(dir, json{{"format", "stylos-checkpoint/1"},
                              {"kind", "tiny-mlm"},
                              {"dim", dim_},
                              {"tokenizer_id", tokenizer_id()},
                              {"vocab", vocab_.words},
                              {"emb", emb_},
                              {"out_w", out_w_},
                              {"out_b", out_b_}});
  }

  const WordVocab& vocab() const { return vocab_; }
  int dim() const { return dim_; }
  const std::vector<double>& embeddings() const { return emb_; }

 private:
  void forward_context(const std::vector<int32_t>& input, size_t p,
                       const std::vector<double>& sum_emb, std::vector<double>& ctx) const {
    size_t n = input.size();
    if (n <= 1) {
      std::fill(ctx.begin(), ctx.end(), 0.0);
      return;
    }
    const double* self = &emb_[static_cast<size_t>(input[p]) * dim_];
    double scale = 1.0 / static_cast<double>(n - 1);
    for (int d = 0; d < dim_; ++d) ctx[d] = (sum_emb[d] - self[d]) * scale;
  }

  void forward_scores(const std::vector<double>& ctx, std::vector<double>& scores) const {
    size_t v = vocab_.words.size();
    for (size_t row = 0; row < v; ++row) {
      const double* w = &out_w_[row * dim_];
      double s = out_b_[row];
      for (int d = 0; d < dim_; ++d) s += w[d] * ctx[d];
      scores[row] = s;
    }
  }

  WordVocab vocab_;
  int dim_ = 32;
  std::vector<double> emb_, out_w_, out_b_;
  AdamW adam_emb_, adam_w_, adam_b_;
  MlmTrainParams params_;
  long total_steps_ = 1;
  long step_ = 0;
};

// ---------------------------------------------------------------------------

class TinyClassifier : public ClassifierModel {
 public:
  TinyClassifier(WordVocab vocab, int dim, std::vector<std::string> classes,
                 std::vector<double> emb, uint64_t seed)
      : vocab_(std::move(vocab)), dim_(dim), classes_(std::move(classes)), emb_(std::move(emb)) {
    head_w_.assign(classes_.size() * dim_, 0.0);
    head_b_.assign(classes_.size(), 0.0);
    Rng rng(derive_seed(seed, "tiny-classifier-init"));
    if (emb_.empty()) {
      emb_.assign(vocab_.words.size() * dim_, 0.0);
      init_uniform(emb_, rng, 0.05);
    }
    init_uniform(head_w_, rng, 0.05);
  }

  explicit TinyClassifier(const json& state) {
    vocab_.words = state.at("vocab").get<std::vector<std::string>>();
    vocab_.reindex();
    dim_ = state.at("dim").get<int>();
    classes_ = state.at("classes").get<std::vector<std::string>>();
    emb_ = state.at("emb").get<std::vector<double>>();
    head_w_ = state.at("head_w").get<std::vector<double>>();
    head_b_ = state.at("head_b").get<std::vector<double>>();
    max_seq_len_ = state.value("max_seq_len", 128);
    if (head_w_.size() != classes_.size() * static_cast<size_t>(dim_)) {
      throw BackendError("tiny classifier checkpoint has inconsistent shapes");
    }
  }

  std::string kind() const override { return "tiny-classifier"; }
  const std::vector<std::string>& classes() const override { return classes_; }

  std::vector<double> predict_proba(std::string_view sentence) const override {
    std::vector<double> x(dim_);
    pool(sentence, x);
    std::vector<double> scores(classes_.size());
    logits(x, scores);
    softmax_inplace(scores);
    return scores;
  }

  void save(const fs::path& dir) const override {
    save_checkpoint(dir, json{{"format", "stylos-checkpoint/1"},
                              {"kind", "tiny-classifier"},
                              {"dim", dim_},
                              {"max_seq_len", max_seq_len_},
                              {"classes", classes_},
                              {"vocab", vocab_.words},
                              {"emb", emb_},
                              {"head_w", head_w_},
                              {"head_b", head_b_}});
  }

  void train(const std::vector<LabeledExample>& train, const std::vector<LabeledExample>& val,
             const ClassifierTrainParams& params, std::vector<EpochLog>* log) {
    max_seq_len_ = params.max_seq_len;
    const size_t c = classes_.size();
    AdamW adam_emb, adam_w, adam_b;
    adam_emb.init(emb_.size(), params.adam_epsilon, params.weight_decay);
    adam_w.init(head_w_.size(), params.adam_epsilon, params.weight_decay);
    adam_b.init(head_b_.size(), params.adam_epsilon, 0.0);

    long steps_per_epoch =
        (static_cast<long>(train.size()) + params.batch_size - 1) / params.batch_size;
    long total_steps = std::max<long>(1, steps_per_epoch * params.epochs);
    long step = 0;

    std::vector<size_t> order(train.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::vector<double> x(dim_), scores(c), g_emb, g_w, g_b;

    for (int epoch = 1; epoch <= params.epochs; ++epoch) {
      Rng rng(derive_seed(params.seed, "tiny-classifier-epoch-" + std::to_string(epoch)));
      rng.shuffle(order);
      double epoch_loss = 0;
      long seen = 0;
      for (size_t begin = 0; begin < order.size(); begin += params.batch_size) {
        size_t end = std::min(order.size(), begin + params.batch_size);
        g_emb.assign(emb_.size(), 0.0);
        g_w.assign(head_w_.size(), 0.0);
        g_b.assign(head_b_.size(), 0.0);
        for (size_t k = begin; k < end; ++k) {
          const LabeledExample& ex = train[order[k]];
          std::vector<int32_t> ids = token_ids(ex.sentence);
          pool_ids(ids, x);
          logits(x, scores);
          softmax_inplace(scores);
          epoch_loss += -std::log(std::max(scores[static_cast<size_t>(ex.label)], 1e-300));
          ++seen;
          scores[static_cast<size_t>(ex.label)] -= 1.0;  // dlogits
          for (size_t row = 0; row < c; ++row) {
            double ds = scores[row];
            g_b[row] += ds;
            double* gw = &g_w[row * dim_];
            for (int d = 0; d < dim_; ++d) gw[d] += ds * x[d];
          }
          if (!ids.empty()) {
            std::vector<double> dx(dim_, 0.0);
            for (size_t row = 0; row < c; ++row) {
              const double* w = &head_w_[row * dim_];
              for (int d = 0; d < dim_; ++d) dx[d] += scores[row] * w[d];
            }
            double scale = 1.0 / static_cast<double>(ids.size());
            for (int32_t id : ids) {
              double* ge = &g_emb[static_cast<size_t>(id) * dim_];
              for (int d = 0; d < dim_; ++d) ge[d] += dx[d] * scale;
            }
          }
        }
        double inv = 1.0 / static_cast<double>(end - begin);
        for (double& g : g_emb) g *= inv;
        for (double& g : g_w) g *= inv;
        for (double& g : g_b) g *= inv;
        double lr = params.learning_rate *
                    std::max(0.0, 1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
        adam_emb.step(emb_, g_emb, lr);
        adam_w.step(head_w_, g_w, lr);
        adam_b.step(head_b_, g_b, lr);
        ++step;
      }
      if (log) {
        long hits = 0;
        for (const auto& ex : val) {
          auto p = predict_proba(ex.sentence);
          int arg = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
          if (arg == ex.label) ++hits;
        }
        double acc = val.empty() ? 0.0 : static_cast<double>(hits) / val.size();
        log->push_back({epoch, seen ? epoch_loss / seen : 0.0, acc});
      }
    }
  }

 private:
  std::vector<int32_t> token_ids(std::string_view sentence) const {
    std::vector<int32_t> ids;
    for (auto w : uni::split_words(sentence)) {
      if (static_cast<int>(ids.size()) >= max_seq_len_) break;  // right truncation
      ids.push_back(vocab_.get(w));
    }
    return ids;
  }

  void pool_ids(const std::vector<int32_t>& ids, std::vector<double>& x) const {
    std::fill(x.begin(), x.end(), 0.0);
    if (ids.empty()) return;
    for (int32_t id : ids) {
      const double* row = &emb_[static_cast<size_t>(id) * dim_];
      for (int d = 0; d < dim_; ++d) x[d] += row[d];
    }
    for (int d = 0; d < dim_; ++d) x[d] /= static_cast<double>(ids.size());
  }

  void pool(std::string_view sentence, std::vector<double>& x) const {
    pool_ids(token_ids(sentence), x);
  }

  void logits(const std::vector<double>& x, std::vector<double>& scores) const {
    for (size_t row = 0; row < classes_.size(); ++row) {
      const double* w = &head_w_[row * dim_];
      double s = head_b_[row];
      for (int d = 0; d < dim_; ++d) s += w[d] * x[d];
      scores[row] = s;
    }
  }

  WordVocab vocab_;
  int dim_ = 32;
  std::vector<std::string> classes_;
  std::vector<double> emb_, head_w_, head_b_;
  int max_seq_len_ = 128;
};

}  // namespace

// ---------------------------------------------------------------------------
// Factory functions shared with backend.cpp.

std::unique_ptr<MlmBackend> make_mlm_backend(const std::string& spec,
                                             const std::vector<std::string>& lines,
                                             const json& options, uint64_t seed) {
  if (spec == "tiny" || spec.empty()) {
    int dim = options.value("embed_dim", 32);
    size_t max_vocab = options.value("max_vocab", static_cast<size_t>(50000));
    return std::make_unique<TinyMlm>(WordVocab::build(lines, max_vocab), dim, seed);
  }
  fs::path dir(spec);
  if (fs::exists(dir / "model.mpk")) return load_mlm_backend(dir);
  throw ConfigError("checkpoint unavailable: base checkpoint '" + spec +
                    "' is neither 'tiny' nor a checkpoint directory");
}

std::unique_ptr<MlmBackend> load_mlm_backend(const fs::path& dir) {
  json state = load_checkpoint(dir);
  if (state.value("kind", "") != "tiny-mlm") {
    throw ConfigError("not an MLM checkpoint: " + dir.string());
  }
  return std::make_unique<TinyMlm>(state);
}

std::unique_ptr<ClassifierModel> train_tiny_classifier(
    const std::string& encoder_spec, const std::vector<std::string>& classes,
    const std::vector<LabeledExample>& train, const std::vector<LabeledExample>& val,
    const ClassifierTrainParams& params, const json& options, std::vector<EpochLog>* log) {
  int dim = options.value("embed_dim", 32);
  WordVocab vocab;
  std::vector<double> emb;
  if (encoder_spec.empty() || encoder_spec == "tiny") {
    std::vector<std::string> texts;
    texts.reserve(train.size());
    for (const auto& ex : train) texts.push_back(ex.sentence);
    vocab = WordVocab::build(texts, options.value("max_vocab", static_cast<size_t>(50000)));
  } else {
    // transfer: vocabulary and embeddings from the MLM checkpoint
    json state = load_checkpoint(encoder_spec);
    if (state.value("kind", "") != "tiny-mlm") {
      throw ConfigError("encoder checkpoint is not a tiny MLM checkpoint: " + encoder_spec);
    }
    vocab.words = state.at("vocab").get<std::vector<std::string>>();
    vocab.reindex();
    dim = state.at("dim").get<int>();
    emb = state.at("emb").get<std::vector<double>>();
  }
  auto model = std::make_unique<TinyClassifier>(std::move(vocab), dim, classes, std::move(emb),
                                                params.seed);
  model->train(train, val, params, log);
  return model;
}

std::unique_ptr<ClassifierModel> load_tiny_classifier(const json& state) {
  return std::make_unique<TinyClassifier>(state);
}

}  // namespace stylos::model
