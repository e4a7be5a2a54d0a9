#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace stylos::tok {

// Deterministic subword tokenizer handle. Implementations must be pure:
// identical text yields identical token sequences.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual const std::string& name() const = 0;
  virtual size_t vocab_size() const = 0;
  virtual std::vector<std::string> encode(std::string_view text) const = 0;
  // Prefix identifying word-internal subtokens ("" when not applicable).
  virtual std::string_view continuation_marker() const { return {}; }
  virtual bool is_special(std::string_view token) const { (void)token; return false; }
  virtual bool is_unknown(std::string_view token) const { (void)token; return false; }
};

// Greedy longest-match-first subword tokenizer over a BERT-style vocab file
// (one token per line; word-internal pieces prefixed with "##").
class WordPieceTokenizer : public Tokenizer {
 public:
  WordPieceTokenizer(std::string name, std::vector<std::string> vocab);
  static WordPieceTokenizer load(std::string name, const std::filesystem::path& vocab_file);

  const std::string& name() const override { return name_; }
  size_t vocab_size() const override { return vocab_.size(); }
  std::vector<std::string> encode(std::string_view text) const override;
  std::string_view continuation_marker() const override { return "##"; }
  bool is_special(std::string_view token) const override;
  bool is_unknown(std::string_view token) const override { return token == unk_; }

 private:
  std::string name_;
  std::vector<std::string> vocab_;
  std::unordered_set<std::string> vocab_set_;
  std::unordered_set<std::string> specials_;
  std::string unk_ = "[UNK]";
  size_t max_word_cps_ = 100;
};

// Toy tokenizer: one token per whitespace-delimited word.
class WordTokenizer : public Tokenizer {
 public:
  explicit WordTokenizer(std::string name = "word-level") : name_(std::move(name)) {}
  const std::string& name() const override { return name_; }
  size_t vocab_size() const override { return 1; }
  std::vector<std::string> encode(std::string_view text) const override;

 private:
  std::string name_;
};

// Toy tokenizer: one token per non-whitespace codepoint.
class CharTokenizer : public Tokenizer {
 public:
  explicit CharTokenizer(std::string name = "char-level") : name_(std::move(name)) {}
  const std::string& name() const override { return name_; }
  size_t vocab_size() const override { return 1; }
  std::vector<std::string> encode(std::string_view text) const override;

 private:
  std::string name_;
};

// "name=path/to/vocab.txt" -> WordPiece; "word-level" / "char-level" -> toys.
std::unique_ptr<Tokenizer> load_tokenizer(const std::string& spec);

}  // namespace stylos::tok
