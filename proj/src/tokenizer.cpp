#include "stylos/tokenizer.hpp"

#include <unicode/uchar.h>

#include <algorithm>

#include "stylos/common.hpp"
#include "stylos/io.hpp"
#include "stylos/unicode.hpp"

namespace stylos::tok {

namespace {

bool is_punct_cp(char32_t cp) {
  auto c = static_cast<UChar32>(cp);
  if (u_ispunct(c)) return true;
  // BERT basic tokenization also isolates ASCII symbol ranges
  return (cp >= 33 && cp <= 47) || (cp >= 58 && cp <= 64) || (cp >= 91 && cp <= 96) ||
         (cp >= 123 && cp <= 126);
}

// Whitespace split + punctuation isolation, the usual pre-tokenization in
// front of WordPiece.
std::vector<std::u32string> basic_tokenize(std::string_view text) {
  std::u32string cps = uni::decode_utf8(text);
  std::vector<std::u32string> words;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(current);
      current.clear();
    }
  };
  for (char32_t cp : cps) {
    if (uni::is_whitespace(cp)) {
      flush();
    } else if (is_punct_cp(cp)) {
      flush();
      words.push_back(std::u32string(1, cp));
    } else {
      current.push_back(cp);
    }
  }
  flush();
  return words;
}

}  // namespace

WordPieceTokenizer::WordPieceTokenizer(std::string name, std::vector<std::string> vocab)
    : name_(std::move(name)), vocab_(std::move(vocab)) {
  if (vocab_.empty()) throw ConfigError("tokenizer '" + name_ + "': empty vocabulary");
  vocab_set_.reserve(vocab_.size() * 2);
  for (const auto& t : vocab_) vocab_set_.insert(t);
  for (const char* s : {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"}) {
    specials_.insert(s);
  }
}

WordPieceTokenizer WordPieceTokenizer::load(std::string name,
                                            const std::filesystem::path& vocab_file) {
  std::vector<std::string> vocab = io::read_lines(vocab_file);
  while (!vocab.empty() && vocab.back().empty()) vocab.pop_back();
  return WordPieceTokenizer(std::move(name), std::move(vocab));
}

bool WordPieceTokenizer::is_special(std::string_view token) const {
  return specials_.count(std::string(token)) > 0;
}

std::vector<std::string> WordPieceTokenizer::encode(std::string_view text) const {
  std::vector<std::string> out;
  for (const auto& word : basic_tokenize(text)) {
    if (word.size() > max_word_cps_) {
      out.push_back(unk_);
      continue;
    }
    std::vector<std::string> pieces;
    size_t start = 0;
    bool bad = false;
    while (start < word.size()) {
      size_t end = word.size();
      std::string match;
      while (end > start) {
        std::string candidate = start > 0 ? "##" : "";
        candidate += uni::encode_utf8(std::u32string_view(word).substr(start, end - start));
        if (vocab_set_.count(candidate)) {
          match = std::move(candidate);
          break;
        }
        --end;
      }
      if (match.empty()) {
        bad = true;
        break;
      }
      pieces.push_back(std::move(match));
      start = end;
    }
    if (bad) {
      out.push_back(unk_);
    } else {
      for (auto& p : pieces) out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<std::string> WordTokenizer::encode(std::string_view text) const {
  std::vector<std::string> out;
  for (auto w : uni::split_words(text)) out.emplace_back(w);
  return out;
}

std::vector<std::string> CharTokenizer::encode(std::string_view text) const {
  std::vector<std::string> out;
  for (char32_t cp : uni::decode_utf8(text)) {
    if (uni::is_whitespace(cp)) continue;
    std::string s;
    uni::append_utf8(s, cp);
    out.push_back(std::move(s));
  }
  return out;
}

std::unique_ptr<Tokenizer> load_tokenizer(const std::string& spec) {
  if (spec == "word-level") return std::make_unique<WordTokenizer>();
  if (spec == "char-level") return std::make_unique<CharTokenizer>();
  size_t eq = spec.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("tokenizer spec must be 'name=vocab_file', 'word-level' or 'char-level': " +
                      spec);
  }
  return std::make_unique<WordPieceTokenizer>(
      WordPieceTokenizer::load(spec.substr(0, eq), spec.substr(eq + 1)));
}

}  // namespace stylos::tok
