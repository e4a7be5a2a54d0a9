#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stylos/tokenizer.hpp"

namespace stylos::tokfit {

struct FitnessReport {
  std::string tokenizer_name;
  std::string sample_name;
  double symbols_per_token = 0;  // mean codepoints per non-special token, marker stripped
  double words_per_token = 0;    // whitespace words / non-special tokens
  long token_count = 0;          // non-special tokens
  long word_count = 0;
  double unknown_token_rate = 0;  // unknown tokens / all emitted tokens
};

// Both metrics over a sample of sentences. Special tokens (padding,
// delimiters, unknowns) are excluded from the counts; the unknown rate is
// reported separately. Errors on an empty or word-free sample.
FitnessReport measure_fitness(const tok::Tokenizer& tokenizer,
                              const std::vector<std::string>& sample,
                              const std::string& sample_name);

double words_per_token(const tok::Tokenizer& tokenizer, const std::vector<std::string>& sample);
double symbols_per_token(const tok::Tokenizer& tokenizer, const std::vector<std::string>& sample);

struct VocabFrequencyRow {
  std::string token;
  long count = 0;
  double relative = 0;
};

// Exact counts over all emitted tokens, sorted by descending count with
// lexicographic tie-break.
std::vector<VocabFrequencyRow> build_vocab_frequency_table(const tok::Tokenizer& tokenizer,
                                                           const std::vector<std::string>& corpus);

void write_frequency_tsv(const std::filesystem::path& path,
                         const std::vector<VocabFrequencyRow>& table);

// Report for a tokenizer x sample grid, matching the two-metric comparison
// table layout. Emits both metrics and declares no winner.
std::string fitness_grid_json(const std::vector<FitnessReport>& reports);

// Fixed-seed uniform sentence sample with (at least) the requested word
// mass, so differently sized corpora compare on equal terms.
std::vector<std::string> sample_equal_words(const std::vector<std::string>& sentences,
                                            size_t target_words, uint64_t seed);

}  // namespace stylos::tokfit
