#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylos/ingest.hpp"

namespace stylos::dataset {

namespace fs = std::filesystem;

enum class Task { author, region };
enum class Split { train, validation };

std::string to_string(Task t);
std::string to_string(Split s);

struct LabelSchema {
  Task task = Task::author;
  std::vector<std::string> classes;  // fixed order, recorded in every manifest
  std::string others_label;          // catch-all class name, "" if none

  // shortlist authors in order + the catch-all appended
  static LabelSchema author_schema(std::vector<std::string> shortlist,
                                   std::string others = "Others");
  static LabelSchema region_schema(std::vector<std::string> regions, std::string other = "Other");

  int index_of(std::string_view label) const;  // -1 if absent
  void validate() const;
};

// Total mapping from author to region; authors missing from the table fall
// into the default region.
struct RegionMap {
  std::map<std::string, std::string> author_to_region;
  std::vector<std::string> region_order;  // named regions, file order
  std::string default_region = "Other";

  const std::string& region_of(std::string_view author) const;
  std::vector<std::string> class_order() const;  // named regions + default

  // CSV columns: author_id, region (header row required)
  static RegionMap load_csv(const fs::path& path);
  void save_csv(const fs::path& path) const;
};

struct Example {
  std::string sentence;
  std::string label;
  std::string doc_id;
  Split split = Split::train;
};

struct DatasetManifest {
  std::string strategy;  // "sentence-random" | "document-balanced"
  uint64_t seed = 0;
  std::string corpus_fingerprint;
  std::vector<std::string> class_order;
  std::map<std::string, long> train_counts;
  std::map<std::string, long> validation_counts;
  long duplicate_sentences = 0;  // flagged, never removed
  std::vector<std::string> excluded_authors;
  std::vector<std::string> excluded_docs;
  std::vector<std::string> dropped_single_document_authors;
  int inferred_class_count = 0;
  double random_baseline = 0;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
};

struct LabeledDataset {
  LabelSchema schema;
  std::vector<Example> examples;
  DatasetManifest manifest;

  std::string content_hash() const;  // sha256 over a canonical serialization
  std::vector<Example> split(Split s) const;
};

struct AuthorBuildOptions {
  uint64_t seed = 0;
  long per_class = 5580;      // total examples per class, validation included
  long val_per_class = 500;
  std::vector<std::string> excluded_authors = {"Pseudo-Plutarch"};
  std::vector<std::string> excluded_docs;
};

// Balanced class -> sentences dataset over the shortlist plus the catch-all
// pooled from all other (non-excluded, attributed) authors. Errors name the
// deficient class and the shortfall.
LabeledDataset build_author_dataset(const std::vector<ingest::NormalizedSentence>& corpus,
                                    const LabelSchema& schema, const AuthorBuildOptions& options);

struct RegionBuildOptions {
  uint64_t seed = 0;
  long per_class_cap = 0;    // 0 = min over region pools
  long val_per_class = 0;    // 0 = use val_fraction
  double val_fraction = 0.1;
  std::vector<std::string> excluded_authors = {"Pseudo-Plutarch"};
  std::vector<std::string> excluded_docs;
};

LabeledDataset build_region_dataset(const std::vector<ingest::NormalizedSentence>& corpus,
                                    const RegionMap& region_map,
                                    const RegionBuildOptions& options);

struct DocBalancedOptions {
  uint64_t seed = 0;
  int min_documents = 2;       // authors below this are dropped and logged
  double test_fraction = 0.2;  // target share of an author's sentences held out
  std::vector<std::string> excluded_authors = {"Pseudo-Plutarch"};
  std::vector<std::string> excluded_docs;
};

// Whole documents are assigned to one side; balance is enforced by
// down-sampling sentences within each side. The held-out side is tagged
// VALIDATION. Zero doc_id overlap between sides, by construction and
// asserted.
LabeledDataset build_document_balanced_split(const std::vector<ingest::NormalizedSentence>& corpus,
                                             const std::vector<std::string>& shortlist,
                                             const DocBalancedOptions& options);

void write_dataset_jsonl(const fs::path& path, const LabeledDataset& dataset);
void write_manifest_json(const fs::path& path, const LabeledDataset& dataset);
LabeledDataset read_dataset_jsonl(const fs::path& data_path, const fs::path& manifest_path);

// data/author_shortlist.csv format: one author_id per row (header optional)
std::vector<std::string> load_shortlist_csv(const fs::path& path);

}  // namespace stylos::dataset
