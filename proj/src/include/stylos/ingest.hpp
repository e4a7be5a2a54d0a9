#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stylos/markup.hpp"

namespace stylos::ingest {

namespace fs = std::filesystem;

inline constexpr const char* kUnknownAuthor = "UNKNOWN";

struct RawDocument {
  std::string doc_id;
  std::string author_id = kUnknownAuthor;
  std::string title;
  std::string body;        // may contain markup
  std::string source_path;
  bool is_xml = false;
};

struct NormalizedSentence {
  std::string text;
  std::string doc_id;
  std::string author_id;
  int index = 0;  // position within document
};

struct NormalizedDocument {
  std::string doc_id;
  std::string author_id;
  std::string title;
  std::vector<NormalizedSentence> sentences;
  long word_count = 0;       // sum of whitespace-delimited words over sentences
  long paragraph_count = 0;  // markup <p> elements, or blank-line blocks in plain text
};

struct CorpusStats {
  long documents = 0;
  long paragraphs = 0;
  long words = 0;
  long sentences = 0;
};

struct SplitOptions {
  int min_words = 3;  // segments below this merge into their neighbor
};

// Splits normalized text at {. ; · ? !} followed by whitespace or end of
// text; delimiters stay with their sentence. Undersized segments merge into
// the following segment, or the preceding one at end of text.
std::vector<std::string> split_sentences(std::string_view normalized, const SplitOptions& opt = {});

struct IngestOptions {
  SplitOptions split;
  markup::StripOptions strip;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Pure per-document conversion; safe to run in parallel.
NormalizedDocument normalize_document(const RawDocument& raw, const IngestOptions& opt,
                                      std::vector<std::string>* log = nullptr);

CorpusStats compute_corpus_stats(const std::vector<NormalizedDocument>& documents);

struct DocumentMeta {
  std::string author_id;
  std::string title;
  std::string region;  // optional hint
};

// CSV columns: doc_id, author_id, title, region (header row required,
// region optional). doc_id matches the file path relative to the ingest
// root, without its extension.
std::map<std::string, DocumentMeta> load_metadata_csv(const fs::path& path);

struct IngestOutput {
  std::vector<NormalizedDocument> documents;  // sorted by doc_id
  CorpusStats stats;
  std::vector<std::string> log;
  std::map<std::string, std::string> author_region_hints;
};

// Walks .xml/.txt files under input_dir, normalizes per document in parallel,
// merges deterministically by doc_id.
IngestOutput ingest_tree(const fs::path& input_dir,
                         const std::map<std::string, DocumentMeta>& metadata,
                         const IngestOptions& opt = {});

// Corpus file: JSON Lines, one NormalizedSentence per line.
void write_corpus_jsonl(const fs::path& path, const std::vector<NormalizedDocument>& documents);
std::vector<NormalizedSentence> read_corpus_jsonl(const fs::path& path);

void write_stats_json(const fs::path& path, const CorpusStats& stats);
CorpusStats read_stats_json(const fs::path& path);

// Groups a sentence stream back into documents (ordered by doc_id, sentences
// by index).
std::vector<NormalizedDocument> group_by_document(std::vector<NormalizedSentence> sentences);

}  // namespace stylos::ingest
