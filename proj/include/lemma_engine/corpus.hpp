#pragma once

// Multi-corpus loading with categorical source ids, the lemma-rule inventory
// and deterministic train/dev splitting.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lemma_engine/conllu.hpp"
#include "lemma_engine/lemma_rule.hpp"

namespace lemma_engine {

struct CorpusError : std::runtime_error {
  explicit CorpusError(const std::string& what) : std::runtime_error(what) {}
};

// How (corpus, author) pairs map to categorical source ids. Primary corpora
// are the shared-task-style annotated data, secondary corpora the auxiliary
// treebanks.
enum class Granularity : uint8_t {
  PerAuthorPerTreebank,
  SinglePrimaryPerTreebank,
  SinglePrimarySingleSecondary,
  Merged,
};

Granularity granularity_from_string(const std::string& s);
std::string to_string(Granularity g);

enum class CorpusGroup : uint8_t { Primary, Secondary };

struct CorpusEntry {
  std::string name;
  std::string path;
  CorpusGroup group = CorpusGroup::Primary;
  std::optional<std::string> author;
  std::optional<std::string> vectors;  // sidecar vector file, if any

  bool operator==(const CorpusEntry&) const = default;
};

struct SourceMap {
  Granularity granularity = Granularity::PerAuthorPerTreebank;
  std::vector<CorpusEntry> entries;

  bool operator==(const SourceMap&) const = default;
};

// Corpus config JSON:
//   {"granularity": "per-author-per-treebank" | "single-primary-per-treebank"
//                   | "single-primary-single-secondary" | "merged",
//    "corpora": [{"name", "path", "group": "primary"|"secondary",
//                 "author"?, "vectors"?}]}
// Relative paths resolve against the config file's directory.
SourceMap load_source_map(const std::string& json_path);
SourceMap parse_source_map(const std::string& json_text, const std::string& base_dir);

// Distinct ids assigned to known corpora under the map's granularity.
uint32_t source_id_count(const SourceMap& map);
// Reserved generic id for unknown sources (coincides with 0 under Merged).
uint32_t unknown_source_id(const SourceMap& map);
// One-hot block width: regular ids plus the reserved one.
uint32_t total_source_ids(const SourceMap& map);

// Deterministic id for a known corpus; `author` overrides the entry's author
// under PerAuthorPerTreebank, where an unknown author yields the reserved
// generic id. Throws CorpusError for unknown corpus names.
uint32_t resolve_source_id(const SourceMap& map, const std::string& corpus_name,
                           const std::optional<std::string>& author = std::nullopt);

// Prediction-time resolution: matches `key` as a corpus name, then as a
// primary author; anything else (or no key) maps to the reserved generic id.
uint32_t resolve_source_or_unknown(const SourceMap& map,
                                   const std::optional<std::string>& key);

struct RuleExample {
  std::string form;
  std::string lemma;
  uint64_t count = 0;

  bool operator==(const RuleExample&) const = default;
};

struct RuleEntry {
  LemmaRule rule;
  std::string rule_string;
  uint64_t frequency = 0;
  std::vector<RuleExample> examples;  // up to 5, most frequent first

  // cached applicability data
  bool absolute = false;
  uint32_t consumes = 0;  // prefix + suffix characters a delta rule needs

  bool operator==(const RuleEntry&) const = default;
};

struct RuleInventory {
  // Sorted by frequency descending, ties by first occurrence in training
  // order; position in the list is the class id.
  std::vector<RuleEntry> entries;
  std::unordered_map<std::string, uint32_t> index;  // rule string -> class id

  std::optional<uint32_t> find(const std::string& rule_string) const;
  bool operator==(const RuleInventory& other) const;
};

RuleInventory build_rule_inventory(
    const std::vector<std::pair<std::string, std::string>>& form_lemma_pairs,
    bool allow_copy);

// First min(k, |inventory|) entries in frequency order.
std::vector<RuleEntry> top_rules(const RuleInventory& inv, size_t k);

struct TrainingSentence {
  Sentence sentence;
  uint32_t source_id = 0;

  bool operator==(const TrainingSentence&) const = default;
};

struct TrainingSet {
  std::vector<TrainingSentence> sentences;
  std::vector<std::string> upos_labels;  // first-occurrence order
  RuleInventory inventory;
  SourceMap source_map;
  bool allow_copy = false;

  // Optional externally supplied per-token vectors, aligned with sentences;
  // empty when unused.
  uint32_t dense_width = 0;
  std::vector<std::vector<std::vector<float>>> ext_vectors;

  uint64_t usable_lemma_tokens = 0;
  uint64_t usable_upos_tokens = 0;
};

struct LoadOptions {
  bool allow_copy = false;
  // Directory of <corpus-name>.vec sidecar files; per-entry "vectors" paths
  // take precedence.
  std::optional<std::string> vectors_dir;
};

// Loads every corpus in the map, assigns source ids, builds the inventory and
// label set. Non-Merged granularities append a deterministic 5% replay of
// primary sentences under the reserved generic id so it receives training
// signal. Throws CorpusError on unreadable files or an empty corpus set.
TrainingSet load_corpora(const SourceMap& config, const LoadOptions& opts = {});

// Rebuilds labels and inventory over the given sentences.
TrainingSet make_training_set(std::vector<TrainingSentence> sentences,
                              SourceMap source_map, bool allow_copy,
                              uint32_t dense_width = 0,
                              std::vector<std::vector<std::vector<float>>> ext = {});

// Deterministic sentence-level split stratified by source id: each source
// contributes floor(dev_fraction * n) sentences (at least 1 when it has >= 2
// and the fraction is positive). Document order is preserved in both halves.
std::pair<TrainingSet, TrainingSet> split(const TrainingSet& ts,
                                          double dev_fraction, uint64_t seed);

// True when the token participates in lemma-rule training/scoring.
bool usable_for_lemma(const Token& token);
// True when the token participates in UPOS training/scoring.
bool usable_for_upos(const Token& token);

}  // namespace lemma_engine
