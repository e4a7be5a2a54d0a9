#include "stylos/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "stylos/common.hpp"
#include "stylos/csv.hpp"
#include "stylos/hash.hpp"
#include "stylos/io.hpp"
#include "stylos/rng.hpp"

namespace stylos::dataset {

using nlohmann::json;
using ingest::NormalizedSentence;

std::string to_string(Task t) { return t == Task::author ? "AUTHOR" : "REGION"; }
std::string to_string(Split s) { return s == Split::train ? "TRAIN" : "VALIDATION"; }

LabelSchema LabelSchema::author_schema(std::vector<std::string> shortlist, std::string others) {
  LabelSchema schema;
  schema.task = Task::author;
  schema.classes = std::move(shortlist);
  schema.classes.push_back(others);
  schema.others_label = std::move(others);
  schema.validate();
  return schema;
}

LabelSchema LabelSchema::region_schema(std::vector<std::string> regions, std::string other) {
  LabelSchema schema;
  schema.task = Task::region;
  schema.classes = std::move(regions);
  schema.classes.push_back(other);
  schema.others_label = std::move(other);
  schema.validate();
  return schema;
}

int LabelSchema::index_of(std::string_view label) const {
  for (size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void LabelSchema::validate() const {
  if (classes.size() < 2) throw ConfigError("label schema needs at least two classes");
  std::unordered_set<std::string> seen;
  for (const auto& c : classes) {
    if (c.empty()) throw ConfigError("label schema has an empty class name");
    if (!seen.insert(c).second) throw ConfigError("duplicate class in schema: " + c);
  }
  if (!others_label.empty() && index_of(others_label) < 0) {
    throw ConfigError("catch-all label '" + others_label + "' is not among the classes");
  }
}

const std::string& RegionMap::region_of(std::string_view author) const {
  auto it = author_to_region.find(std::string(author));
  return it == author_to_region.end() ? default_region : it->second;
}

std::vector<std::string> RegionMap::class_order() const {
  std::vector<std::string> order = region_order;
  order.push_back(default_region);
  return order;
}

RegionMap RegionMap::load_csv(const fs::path& path) {
  auto rows = csv::parse(io::read_file(path));
  if (rows.empty()) throw ConfigError("region map is empty: " + path.string());
  RegionMap map;
  size_t start = 0;
  if (!rows[0].empty() && (rows[0][0] == "author_id" || rows[0][0] == "author")) start = 1;
  for (size_t r = start; r < rows.size(); ++r) {
    if (rows[r].size() < 2 || rows[r][0].empty()) continue;
    const std::string& author = rows[r][0];
    const std::string& region = rows[r][1];
    map.author_to_region[author] = region;
    if (region != map.default_region &&
        std::find(map.region_order.begin(), map.region_order.end(), region) ==
            map.region_order.end()) {
      map.region_order.push_back(region);
    }
  }
  if (map.region_order.empty()) throw ConfigError("region map names no regions: " + path.string());
  return map;
}

void RegionMap::save_csv(const fs::path& path) const {
  std::ostringstream out;
  out << "author_id,region\n";
  for (const auto& [author, region] : author_to_region) {
    out << csv::escape(author) << ',' << csv::escape(region) << '\n';
  }
  io::write_file_atomic(path, out.str());
}

json DatasetManifest::to_json() const {
  return json{{"strategy", strategy},
              {"seed", seed},
              {"corpus_fingerprint", corpus_fingerprint},
              {"class_order", class_order},
              {"train_counts", train_counts},
              {"validation_counts", validation_counts},
              {"duplicate_sentences", duplicate_sentences},
              {"excluded_authors", excluded_authors},
              {"excluded_docs", excluded_docs},
              {"dropped_single_document_authors", dropped_single_document_authors},
              {"inferred_class_count", inferred_class_count},
              {"random_baseline", random_baseline}};
}

DatasetManifest DatasetManifest::from_json(const json& j) {
  DatasetManifest m;
  m.strategy = j.value("strategy", "");
  m.seed = j.value("seed", uint64_t{0});
  m.corpus_fingerprint = j.value("corpus_fingerprint", "");
  m.class_order = j.value("class_order", std::vector<std::string>{});
  m.train_counts = j.value("train_counts", std::map<std::string, long>{});
  m.validation_counts = j.value("validation_counts", std::map<std::string, long>{});
  m.duplicate_sentences = j.value("duplicate_sentences", 0L);
  m.excluded_authors = j.value("excluded_authors", std::vector<std::string>{});
  m.excluded_docs = j.value("excluded_docs", std::vector<std::string>{});
  m.dropped_single_document_authors =
      j.value("dropped_single_document_authors", std::vector<std::string>{});
  m.inferred_class_count = j.value("inferred_class_count", 0);
  m.random_baseline = j.value("random_baseline", 0.0);
  return m;
}

std::string LabeledDataset::content_hash() const {
  hash::Sha256 h;
  for (const auto& c : schema.classes) {
    h.update(c);
    h.update(std::string_view("\x1e", 1));
  }
  for (const auto& ex : examples) {
    h.update(ex.sentence);
    h.update(std::string_view("\x1f", 1));
    h.update(ex.label);
    h.update(std::string_view("\x1f", 1));
    h.update(ex.doc_id);
    h.update(std::string_view("\x1f", 1));
    h.update(to_string(ex.split));
    h.update(std::string_view("\n", 1));
  }
  return h.hex();
}

std::vector<Example> LabeledDataset::split(Split s) const {
  std::vector<Example> out;
  for (const auto& ex : examples) {
    if (ex.split == s) out.push_back(ex);
  }
  return out;
}

namespace {

std::string corpus_fingerprint(const std::vector<NormalizedSentence>& corpus) {
  hash::Sha256 h;
  for (const auto& s : corpus) {
    h.update(s.doc_id);
    h.update(std::string_view("\x1f", 1));
    h.update(std::to_string(s.index));
    h.update(std::string_view("\x1f", 1));
    h.update(s.text);
    h.update(std::string_view("\n", 1));
  }
  return h.hex();
}

long count_duplicates(const std::vector<Example>& examples) {
  std::unordered_set<std::string> distinct;
  for (const auto& ex : examples) distinct.insert(ex.sentence);
  return static_cast<long>(examples.size()) - static_cast<long>(distinct.size());
}

struct ExclusionFilter {
  std::unordered_set<std::string> authors;
  std::unordered_set<std::string> docs;

  ExclusionFilter(const std::vector<std::string>& excluded_authors,
                  const std::vector<std::string>& excluded_docs) {
    authors.insert(excluded_authors.begin(), excluded_authors.end());
    docs.insert(excluded_docs.begin(), excluded_docs.end());
  }

  bool excluded(const NormalizedSentence& s) const {
    return s.author_id == ingest::kUnknownAuthor || authors.count(s.author_id) > 0 ||
           docs.count(s.doc_id) > 0;
  }
};

// Uniform draw of `total` sentences; the first `val` drawn become VALIDATION.
void sample_class(const std::vector<const NormalizedSentence*>& pool, const std::string& label,
                  long total, long val, uint64_t seed, const std::string& stream,
                  std::vector<Example>& out) {
  Rng rng(derive_seed(seed, stream));
  std::vector<size_t> picks = rng.sample_indices(pool.size(), static_cast<size_t>(total));
  for (size_t k = 0; k < picks.size(); ++k) {
    const NormalizedSentence* s = pool[picks[k]];
    Split split = static_cast<long>(k) < val ? Split::validation : Split::train;
    out.push_back(Example{s->text, label, s->doc_id, split});
  }
}

}  // namespace

LabeledDataset build_author_dataset(const std::vector<NormalizedSentence>& corpus,
                                    const LabelSchema& schema,
                                    const AuthorBuildOptions& options) {
  schema.validate();
  if (options.per_class < 1) throw ConfigError("author dataset: per_class must be >= 1");
  if (options.val_per_class < 0 || options.val_per_class >= options.per_class) {
    throw ConfigError("author dataset: val_per_class must be in [0, per_class)");
  }
  ExclusionFilter filter(options.excluded_authors, options.excluded_docs);
  std::unordered_set<std::string> named;
  for (const auto& c : schema.classes) {
    if (c != schema.others_label) named.insert(c);
  }

  std::map<std::string, std::vector<const NormalizedSentence*>> by_author;
  std::vector<const NormalizedSentence*> others_pool;
  for (const auto& s : corpus) {
    if (filter.excluded(s)) continue;
    if (named.count(s.author_id)) {
      by_author[s.author_id].push_back(&s);
    } else if (!schema.others_label.empty()) {
      others_pool.push_back(&s);
    }
  }

  LabeledDataset dataset;
  dataset.schema = schema;
  for (const auto& label : schema.classes) {
    const bool is_others = label == schema.others_label;
    const auto& pool = is_others ? others_pool : by_author[label];
    if (static_cast<long>(pool.size()) < options.per_class) {
      throw DataError("author dataset: class '" + label + "' has " +
                      std::to_string(pool.size()) + " sentences, needs " +
                      std::to_string(options.per_class) + " (short by " +
                      std::to_string(options.per_class - static_cast<long>(pool.size())) + ")");
    }
    sample_class(pool, label, options.per_class, options.val_per_class, options.seed,
                 "author-class:" + label, dataset.examples);
  }

  DatasetManifest& m = dataset.manifest;
  m.strategy = "sentence-random";
  m.seed = options.seed;
  m.corpus_fingerprint = corpus_fingerprint(corpus);
  m.class_order = schema.classes;
  for (const auto& label : schema.classes) {
    m.train_counts[label] = options.per_class - options.val_per_class;
    m.validation_counts[label] = options.val_per_class;
  }
  m.duplicate_sentences = count_duplicates(dataset.examples);
  m.excluded_authors = options.excluded_authors;
  m.excluded_docs = options.excluded_docs;
  m.inferred_class_count = static_cast<int>(schema.classes.size());
  m.random_baseline = 1.0 / static_cast<double>(schema.classes.size());
  return dataset;
}

LabeledDataset build_region_dataset(const std::vector<NormalizedSentence>& corpus,
                                    const RegionMap& region_map,
                                    const RegionBuildOptions& options) {
  ExclusionFilter filter(options.excluded_authors, options.excluded_docs);
  LabelSchema schema;
  schema.task = Task::region;
  schema.classes = region_map.class_order();
  schema.others_label = region_map.default_region;
  schema.validate();

  std::map<std::string, std::vector<const NormalizedSentence*>> pools;
  for (const auto& label : schema.classes) pools[label];
  for (const auto& s : corpus) {
    if (filter.excluded(s)) continue;
    pools[region_map.region_of(s.author_id)].push_back(&s);
  }

  long per_class = -1;
  for (const auto& label : schema.classes) {
    if (pools[label].empty()) throw DataError("region dataset: empty region pool '" + label + "'");
    long n = static_cast<long>(pools[label].size());
    per_class = per_class < 0 ? n : std::min(per_class, n);
  }
  if (options.per_class_cap > 0) per_class = std::min(per_class, options.per_class_cap);

  long val = options.val_per_class > 0
                 ? options.val_per_class
                 : std::max<long>(1, static_cast<long>(std::floor(
                                         static_cast<double>(per_class) * options.val_fraction)));
  if (val >= per_class) {
    throw ConfigError("region dataset: validation size " + std::to_string(val) +
                      " leaves no training data (per-class size " + std::to_string(per_class) +
                      ")");
  }

  LabeledDataset dataset;
  dataset.schema = schema;
  for (const auto& label : schema.classes) {
    sample_class(pools[label], label, per_class, val, options.seed, "region-class:" + label,
                 dataset.examples);
  }

  DatasetManifest& m = dataset.manifest;
  m.strategy = "sentence-random";
  m.seed = options.seed;
  m.corpus_fingerprint = corpus_fingerprint(corpus);
  m.class_order = schema.classes;
  for (const auto& label : schema.classes) {
    m.train_counts[label] = per_class - val;
    m.validation_counts[label] = val;
  }
  m.duplicate_sentences = count_duplicates(dataset.examples);
  m.excluded_authors = options.excluded_authors;
  m.excluded_docs = options.excluded_docs;
  m.inferred_class_count = static_cast<int>(schema.classes.size());
  m.random_baseline = 1.0 / static_cast<double>(schema.classes.size());
  return dataset;
}

LabeledDataset build_document_balanced_split(const std::vector<NormalizedSentence>& corpus,
                                             const std::vector<std::string>& shortlist,
                                             const DocBalancedOptions& options) {
  if (options.test_fraction <= 0 || options.test_fraction >= 1) {
    throw ConfigError("document-balanced split: test_fraction must be in (0, 1)");
  }
  if (options.min_documents < 2) {
    throw ConfigError("document-balanced split: min_documents must be >= 2");
  }
  ExclusionFilter filter(options.excluded_authors, options.excluded_docs);

  // author -> doc -> sentences
  std::map<std::string, std::map<std::string, std::vector<const NormalizedSentence*>>> by_author;
  std::unordered_set<std::string> wanted(shortlist.begin(), shortlist.end());
  for (const auto& s : corpus) {
    if (filter.excluded(s) || !wanted.count(s.author_id)) continue;
    by_author[s.author_id][s.doc_id].push_back(&s);
  }

  std::vector<std::string> classes;
  std::vector<std::string> dropped;
  for (const auto& author : shortlist) {
    auto it = by_author.find(author);
    long docs = it == by_author.end() ? 0 : static_cast<long>(it->second.size());
    if (docs >= options.min_documents) classes.push_back(author);
    else dropped.push_back(author);
  }
  if (classes.size() < 2) {
    throw DataError("document-balanced split: fewer than 2 authors have " +
                    std::to_string(options.min_documents) + "+ documents");
  }

  LabelSchema schema;
  schema.task = Task::author;
  schema.classes = classes;
  schema.validate();

  struct SidePool {
    std::vector<const NormalizedSentence*> sentences;
  };
  std::map<std::string, SidePool> train_pool, test_pool;
  std::unordered_set<std::string> train_docs, test_docs;

  for (const auto& author : classes) {
    const auto& docs = by_author[author];
    std::vector<std::string> doc_ids;
    long total = 0;
    for (const auto& [doc_id, sents] : docs) {
      doc_ids.push_back(doc_id);
      total += static_cast<long>(sents.size());
    }
    Rng rng(derive_seed(options.seed, "docsplit:" + author));
    rng.shuffle(doc_ids);
    long target = std::max<long>(1, static_cast<long>(std::llround(
                                        static_cast<double>(total) * options.test_fraction)));
    long test_count = 0;
    size_t cut = 0;  // doc_ids[0, cut) go to test
    while (cut + 1 < doc_ids.size() && test_count < target) {
      test_count += static_cast<long>(docs.at(doc_ids[cut]).size());
      ++cut;
    }
    if (cut == 0) cut = 1;  // at least one document held out
    for (size_t i = 0; i < doc_ids.size(); ++i) {
      const auto& sents = docs.at(doc_ids[i]);
      auto& side = i < cut ? test_pool[author] : train_pool[author];
      auto& doc_set = i < cut ? test_docs : train_docs;
      doc_set.insert(doc_ids[i]);
      side.sentences.insert(side.sentences.end(), sents.begin(), sents.end());
    }
  }

  for (const auto& d : test_docs) {
    if (train_docs.count(d)) {
      throw std::logic_error("document-balanced split: doc on both sides: " + d);
    }
  }

  long train_per_class = -1, test_per_class = -1;
  for (const auto& author : classes) {
    long tr = static_cast<long>(train_pool[author].sentences.size());
    long te = static_cast<long>(test_pool[author].sentences.size());
    if (tr == 0 || te == 0) {
      throw DataError("document-balanced split: author '" + author + "' has an empty side");
    }
    train_per_class = train_per_class < 0 ? tr : std::min(train_per_class, tr);
    test_per_class = test_per_class < 0 ? te : std::min(test_per_class, te);
  }

  LabeledDataset dataset;
  dataset.schema = schema;
  auto downsample = [&](const std::vector<const NormalizedSentence*>& pool,
                        const std::string& label, long take, Split split,
                        const std::string& stream) {
    Rng rng(derive_seed(options.seed, stream + label));
    for (size_t idx : rng.sample_indices(pool.size(), static_cast<size_t>(take))) {
      dataset.examples.push_back(Example{pool[idx]->text, label, pool[idx]->doc_id, split});
    }
  };
  for (const auto& author : classes) {
    downsample(train_pool[author].sentences, author, train_per_class, Split::train,
               "docsplit-train:");
    downsample(test_pool[author].sentences, author, test_per_class, Split::validation,
               "docsplit-test:");
  }

  DatasetManifest& m = dataset.manifest;
  m.strategy = "document-balanced";
  m.seed = options.seed;
  m.corpus_fingerprint = corpus_fingerprint(corpus);
  m.class_order = classes;
  for (const auto& label : classes) {
    m.train_counts[label] = train_per_class;
    m.validation_counts[label] = test_per_class;
  }
  m.duplicate_sentences = count_duplicates(dataset.examples);
  m.excluded_authors = options.excluded_authors;
  m.excluded_docs = options.excluded_docs;
  m.dropped_single_document_authors = dropped;
  m.inferred_class_count = static_cast<int>(classes.size());
  m.random_baseline = 1.0 / static_cast<double>(classes.size());
  return dataset;
}

void write_dataset_jsonl(const fs::path& path, const LabeledDataset& dataset) {
  std::ostringstream buf;
  for (const auto& ex : dataset.examples) {
    buf << json{{"sentence", ex.sentence},
                {"label", ex.label},
                {"doc_id", ex.doc_id},
                {"split", to_string(ex.split)}}
               .dump()
        << '\n';
  }
  io::write_file_atomic(path, buf.str());
}

void write_manifest_json(const fs::path& path, const LabeledDataset& dataset) {
  json j = dataset.manifest.to_json();
  j["task"] = to_string(dataset.schema.task);
  j["others_label"] = dataset.schema.others_label;
  j["content_hash"] = dataset.content_hash();
  io::write_file_atomic(path, j.dump(2) + "\n");
}

LabeledDataset read_dataset_jsonl(const fs::path& data_path, const fs::path& manifest_path) {
  LabeledDataset dataset;
  json mj = json::parse(io::read_file(manifest_path));
  dataset.manifest = DatasetManifest::from_json(mj);
  dataset.schema.task = mj.value("task", "AUTHOR") == "REGION" ? Task::region : Task::author;
  dataset.schema.classes = dataset.manifest.class_order;
  dataset.schema.others_label = mj.value("others_label", "");
  for (const auto& line : io::read_lines(data_path)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    Example ex;
    ex.sentence = rec.at("sentence").get<std::string>();
    ex.label = rec.at("label").get<std::string>();
    ex.doc_id = rec.at("doc_id").get<std::string>();
    ex.split = rec.at("split").get<std::string>() == "VALIDATION" ? Split::validation : Split::train;
    dataset.examples.push_back(std::move(ex));
  }
  return dataset;
}

std::vector<std::string> load_shortlist_csv(const fs::path& path) {
  auto rows = csv::parse(io::read_file(path));
  std::vector<std::string> shortlist;
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].empty() || rows[r][0].empty()) continue;
    if (r == 0 && (rows[r][0] == "author_id" || rows[r][0] == "author")) continue;
    shortlist.push_back(rows[r][0]);
  }
  if (shortlist.empty()) throw ConfigError("author shortlist is empty: " + path.string());
  return shortlist;
}

}  // namespace stylos::dataset
