#include "stylos/tokfit.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stylos/common.hpp"
#include "stylos/io.hpp"
#include "stylos/rng.hpp"
#include "stylos/unicode.hpp"

namespace stylos::tokfit {

namespace {

struct Tally {
  long words = 0;
  long tokens = 0;    // non-special
  long symbols = 0;   // codepoints of non-special tokens, marker stripped
  long unknown = 0;
  long emitted = 0;   // all tokens

  Tally& operator+=(const Tally& o) {
    words += o.words;
    tokens += o.tokens;
    symbols += o.symbols;
    unknown += o.unknown;
    emitted += o.emitted;
    return *this;
  }
};

Tally tally_sentence(const tok::Tokenizer& tokenizer, std::string_view sentence) {
  Tally t;
  t.words = static_cast<long>(uni::word_count(sentence));
  std::string_view marker = tokenizer.continuation_marker();
  for (const auto& token : tokenizer.encode(sentence)) {
    ++t.emitted;
    if (tokenizer.is_unknown(token)) ++t.unknown;
    if (tokenizer.is_special(token) || tokenizer.is_unknown(token)) continue;
    ++t.tokens;
    std::string_view body = token;
    if (!marker.empty() && body.substr(0, marker.size()) == marker) body.remove_prefix(marker.size());
    t.symbols += static_cast<long>(uni::codepoint_count(body));
  }
  return t;
}

// Deterministic parallel reduction: per-chunk tallies summed in chunk order.
Tally tally_sample(const tok::Tokenizer& tokenizer, const std::vector<std::string>& sample) {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(sample.size(), 1)));
  std::vector<Tally> partial(threads);
  std::atomic<size_t> next{0};
  constexpr size_t kChunk = 256;
  auto worker = [&](unsigned slot) {
    for (;;) {
      size_t begin = next.fetch_add(kChunk);
      if (begin >= sample.size()) return;
      size_t end = std::min(begin + kChunk, sample.size());
      for (size_t i = begin; i < end; ++i) partial[slot] += tally_sentence(tokenizer, sample[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& t : pool) t.join();
  Tally total;
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace

FitnessReport measure_fitness(const tok::Tokenizer& tokenizer,
                              const std::vector<std::string>& sample,
                              const std::string& sample_name) {
  if (sample.empty()) throw DataError("tokenizer fitness: empty sample '" + sample_name + "'");
  Tally t = tally_sample(tokenizer, sample);
  if (t.words == 0) throw DataError("tokenizer fitness: sample '" + sample_name + "' has no words");
  FitnessReport report;
  report.tokenizer_name = tokenizer.name();
  report.sample_name = sample_name;
  report.token_count = t.tokens;
  report.word_count = t.words;
  report.unknown_token_rate = t.emitted ? static_cast<double>(t.unknown) / t.emitted : 0.0;
  report.words_per_token = t.tokens ? static_cast<double>(t.words) / t.tokens : 0.0;
  report.symbols_per_token = t.tokens ? static_cast<double>(t.symbols) / t.tokens : 0.0;
  return report;
}

double words_per_token(const tok::Tokenizer& tokenizer, const std::vector<std::string>& sample) {
  return measure_fitness(tokenizer, sample, "sample").words_per_token;
}

double symbols_per_token(const tok::Tokenizer& tokenizer, const std::vector<std::string>& sample) {
  return measure_fitness(tokenizer, sample, "sample").symbols_per_token;
}

std::vector<VocabFrequencyRow> build_vocab_frequency_table(
    const tok::Tokenizer& tokenizer, const std::vector<std::string>& corpus) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const auto& sentence : corpus) {
    for (auto& token : tokenizer.encode(sentence)) {
      ++counts[token];
      ++total;
    }
  }
  std::vector<VocabFrequencyRow> table;
  table.reserve(counts.size());
  for (auto& [token, count] : counts) {
    table.push_back({token, count, total ? static_cast<double>(count) / total : 0.0});
  }
  std::sort(table.begin(), table.end(), [](const VocabFrequencyRow& a, const VocabFrequencyRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  });
  return table;
}

void write_frequency_tsv(const std::filesystem::path& path,
                         const std::vector<VocabFrequencyRow>& table) {
  std::ostringstream out;
  out << "token\tcount\trelative_frequency\n";
  out.precision(12);
  for (const auto& row : table) {
    out << row.token << '\t' << row.count << '\t' << row.relative << '\n';
  }
  io::write_file_atomic(path, out.str());
}

std::string fitness_grid_json(const std::vector<FitnessReport>& reports) {
  nlohmann::json grid;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : reports) {
    list.push_back({{"tokenizer", r.tokenizer_name},
                    {"sample", r.sample_name},
                    {"symbols_per_token", r.symbols_per_token},
                    {"words_per_token", r.words_per_token},
                    {"token_count", r.token_count},
                    {"word_count", r.word_count},
                    {"unknown_token_rate", r.unknown_token_rate}});
    grid["symbols_per_token"][r.tokenizer_name][r.sample_name] = r.symbols_per_token;
    grid["words_per_token"][r.tokenizer_name][r.sample_name] = r.words_per_token;
  }
  nlohmann::json j{{"reports", list}, {"table", grid}};
  return j.dump(2) + "\n";
}

std::vector<std::string> sample_equal_words(const std::vector<std::string>& sentences,
                                            size_t target_words, uint64_t seed) {
  std::vector<size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(derive_seed(seed, "tokfit-sample"));
  rng.shuffle(order);
  std::vector<std::string> sample;
  size_t words = 0;
  for (size_t idx : order) {
    if (words >= target_words) break;
    sample.push_back(sentences[idx]);
    words += uni::word_count(sentences[idx]);
  }
  return sample;
}

}  // namespace stylos::tokfit
