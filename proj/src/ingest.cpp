#include "stylos/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stylos/common.hpp"
#include "stylos/csv.hpp"
#include "stylos/io.hpp"
#include "stylos/unicode.hpp"

namespace stylos::ingest {

namespace {

using nlohmann::json;

bool is_sentence_delimiter(char32_t cp) {
  return cp == U'.' || cp == U';' || cp == U'?' || cp == U'!' || cp == 0xB7;
}

std::string join_with_space(const std::string& a, std::string_view b) {
  if (a.empty()) return std::string(b);
  if (b.empty()) return a;
  return a + " " + std::string(b);
}

long count_blankline_paragraphs(std::string_view body) {
  long paragraphs = 0;
  bool in_block = false;
  size_t line_start = 0;
  for (size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == '\n') {
      std::string_view line = body.substr(line_start, i - line_start);
      bool blank = line.find_first_not_of(" \t\r\f\v") == std::string_view::npos;
      if (!blank && !in_block) ++paragraphs;
      in_block = !blank;
      line_start = i + 1;
    }
  }
  return paragraphs;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view normalized, const SplitOptions& opt) {
  std::u32string cps = uni::decode_utf8(normalized);
  std::vector<std::u32string> segments;
  std::u32string current;
  for (size_t i = 0; i < cps.size(); ++i) {
    current.push_back(cps[i]);
    if (is_sentence_delimiter(cps[i])) {
      bool at_end = i + 1 == cps.size();
      bool before_ws = !at_end && uni::is_whitespace(cps[i + 1]);
      if (at_end || before_ws) {
        segments.push_back(current);
        current.clear();
        if (before_ws) ++i;  // boundary whitespace is consumed
      }
    }
  }
  if (!current.empty()) segments.push_back(current);

  std::vector<std::string> sentences;
  std::string pending;
  for (const auto& seg : segments) {
    std::string text = uni::encode_utf8(seg);
    // trim (normalized input only has single interior spaces)
    while (!text.empty() && text.front() == ' ') text.erase(text.begin());
    while (!text.empty() && text.back() == ' ') text.pop_back();
    if (text.empty()) continue;
    pending = join_with_space(pending, text);
    if (uni::word_count(pending) >= static_cast<size_t>(opt.min_words)) {
      sentences.push_back(std::move(pending));
      pending.clear();
    }
  }
  if (!pending.empty()) {
    if (sentences.empty()) {
      sentences.push_back(std::move(pending));
    } else {
      sentences.back() = join_with_space(sentences.back(), pending);
    }
  }
  return sentences;
}

NormalizedDocument normalize_document(const RawDocument& raw, const IngestOptions& opt,
                                      std::vector<std::string>* log) {
  NormalizedDocument doc;
  doc.doc_id = raw.doc_id;
  doc.author_id = raw.author_id;
  doc.title = raw.title;

  std::string text;
  if (raw.is_xml) {
    markup::StripResult stripped = markup::strip_markup(raw.body, opt.strip);
    text = std::move(stripped.text);
    doc.paragraph_count = stripped.paragraph_count;
    if (log) {
      for (const auto& w : stripped.warnings) log->push_back(raw.doc_id + ": " + w);
      if (stripped.dropped_elements > 0) {
        log->push_back(raw.doc_id + ": dropped " + std::to_string(stripped.dropped_elements) +
                       " note-like element(s)");
      }
    }
  } else {
    text = raw.body;
    doc.paragraph_count = count_blankline_paragraphs(raw.body);
  }

  std::string normalized = uni::normalize_text(text);
  if (normalized.empty()) {
    if (log) log->push_back(raw.doc_id + ": empty after normalization (kept, flagged)");
    return doc;
  }
  if (raw.is_xml && doc.paragraph_count == 0) doc.paragraph_count = 1;

  std::vector<std::string> texts = split_sentences(normalized, opt.split);
  doc.sentences.reserve(texts.size());
  int index = 0;
  for (auto& t : texts) {
    doc.word_count += static_cast<long>(uni::word_count(t));
    doc.sentences.push_back(NormalizedSentence{std::move(t), doc.doc_id, doc.author_id, index++});
  }
  return doc;
}

CorpusStats compute_corpus_stats(const std::vector<NormalizedDocument>& documents) {
  CorpusStats stats;
  stats.documents = static_cast<long>(documents.size());
  for (const auto& doc : documents) {
    stats.paragraphs += doc.paragraph_count;
    stats.words += doc.word_count;
    stats.sentences += static_cast<long>(doc.sentences.size());
  }
  return stats;
}

std::map<std::string, DocumentMeta> load_metadata_csv(const fs::path& path) {
  std::string text = io::read_file(path);
  auto rows = csv::parse(text);
  if (rows.empty()) throw DataError("metadata table is empty: " + path.string());
  const auto& header = rows[0];
  auto col = [&](std::string_view name) -> int {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  int c_doc = col("doc_id"), c_author = col("author_id"), c_title = col("title"),
      c_region = col("region");
  if (c_doc < 0 || c_author < 0) {
    throw ConfigError("metadata table needs doc_id and author_id columns: " + path.string());
  }
  std::map<std::string, DocumentMeta> table;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto get = [&](int c) -> std::string {
      return (c >= 0 && static_cast<size_t>(c) < row.size()) ? row[c] : std::string{};
    };
    std::string doc_id = get(c_doc);
    if (doc_id.empty()) continue;
    DocumentMeta meta{get(c_author), get(c_title), get(c_region)};
    if (meta.author_id.empty()) meta.author_id = kUnknownAuthor;
    table[doc_id] = std::move(meta);
  }
  return table;
}

IngestOutput ingest_tree(const fs::path& input_dir,
                         const std::map<std::string, DocumentMeta>& metadata,
                         const IngestOptions& opt) {
  std::vector<RawDocument> raws;
  for (const auto& file : io::list_files(input_dir)) {
    std::string ext = file.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext != ".xml" && ext != ".txt") continue;
    RawDocument raw;
    fs::path rel = file.lexically_relative(input_dir);
    raw.doc_id = (rel.parent_path() / rel.stem()).generic_string();
    raw.source_path = file.string();
    raw.is_xml = ext == ".xml";
    raw.body = io::read_file(file);
    raws.push_back(std::move(raw));
  }

  IngestOutput out;
  for (auto& raw : raws) {
    auto it = metadata.find(raw.doc_id);
    if (it != metadata.end()) {
      raw.author_id = it->second.author_id;
      raw.title = it->second.title;
      if (!it->second.region.empty()) out.author_region_hints[raw.author_id] = it->second.region;
    } else {
      out.log.push_back(raw.doc_id + ": no metadata entry, author set to UNKNOWN");
    }
    if (raw.body.empty()) out.log.push_back(raw.doc_id + ": empty body (kept, flagged)");
  }

  // doc_id must be unique within a corpus
  {
    std::vector<std::string> ids;
    ids.reserve(raws.size());
    for (const auto& r : raws) ids.push_back(r.doc_id);
    std::sort(ids.begin(), ids.end());
    auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) throw DataError("duplicate doc_id in corpus: " + *dup);
  }

  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<size_t>(raws.size(), 1));
  std::vector<NormalizedDocument> docs(raws.size());
  std::vector<std::vector<std::string>> logs(raws.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= raws.size()) return;
      docs[i] = normalize_document(raws[i], opt, &logs[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t + 1 < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // deterministic merge ordered by doc_id
  std::vector<size_t> order(docs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return docs[a].doc_id < docs[b].doc_id; });
  for (size_t i : order) {
    out.documents.push_back(std::move(docs[i]));
    for (auto& line : logs[i]) out.log.push_back(std::move(line));
  }
  out.stats = compute_corpus_stats(out.documents);
  return out;
}

void write_corpus_jsonl(const fs::path& path, const std::vector<NormalizedDocument>& documents) {
  std::ostringstream buf;
  for (const auto& doc : documents) {
    for (const auto& s : doc.sentences) {
      json rec{{"doc_id", s.doc_id}, {"author_id", s.author_id}, {"index", s.index},
               {"text", s.text}};
      buf << rec.dump() << '\n';
    }
  }
  io::write_file_atomic(path, buf.str());
}

std::vector<NormalizedSentence> read_corpus_jsonl(const fs::path& path) {
  std::vector<NormalizedSentence> sentences;
  for (const auto& line : io::read_lines(path)) {
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw DataError("bad JSON line in corpus file: " + path.string());
    NormalizedSentence s;
    s.text = rec.at("text").get<std::string>();
    s.doc_id = rec.at("doc_id").get<std::string>();
    s.author_id = rec.at("author_id").get<std::string>();
    s.index = rec.at("index").get<int>();
    sentences.push_back(std::move(s));
  }
  return sentences;
}

void write_stats_json(const fs::path& path, const CorpusStats& stats) {
  json j{{"documents", stats.documents},
         {"paragraphs", stats.paragraphs},
         {"words", stats.words},
         {"sentences", stats.sentences}};
  io::write_file_atomic(path, j.dump(2) + "\n");
}

CorpusStats read_stats_json(const fs::path& path) {
  json j = json::parse(io::read_file(path));
  CorpusStats stats;
  stats.documents = j.at("documents").get<long>();
  stats.paragraphs = j.at("paragraphs").get<long>();
  stats.words = j.at("words").get<long>();
  stats.sentences = j.at("sentences").get<long>();
  return stats;
}

std::vector<NormalizedDocument> group_by_document(std::vector<NormalizedSentence> sentences) {
  std::stable_sort(sentences.begin(), sentences.end(),
                   [](const NormalizedSentence& a, const NormalizedSentence& b) {
                     return std::tie(a.doc_id, a.index) < std::tie(b.doc_id, b.index);
                   });
  std::vector<NormalizedDocument> docs;
  for (auto& s : sentences) {
    if (docs.empty() || docs.back().doc_id != s.doc_id) {
      NormalizedDocument doc;
      doc.doc_id = s.doc_id;
      doc.author_id = s.author_id;
      docs.push_back(std::move(doc));
    }
    docs.back().word_count += static_cast<long>(uni::word_count(s.text));
    docs.back().sentences.push_back(std::move(s));
  }
  return docs;
}

}  // namespace stylos::ingest
