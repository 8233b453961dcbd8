#pragma once

// Hashed sparse feature extraction shared by both classifier heads. The full
// feature space is laid out as [hashed | source one-hot | dense]:
//   [0, hash_dim)                      hashed template features, value 1
//   [hash_dim, hash_dim + S)           one-hot source id
//   [hash_dim + S, full_dim)           externally supplied dense vector

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lemma_engine/conllu.hpp"

namespace lemma_engine {

struct FeatureConfig {
  uint64_t hash_dim = 1ull << 20;
  uint32_t window = 2;       // context offsets -window..+window
  uint32_t num_sources = 1;  // one-hot width, reserved generic id included
  uint32_t dense_width = 0;
  bool allow_copy = false;

  uint64_t full_dim() const { return hash_dim + num_sources + dense_width; }

  bool operator==(const FeatureConfig&) const = default;
};

// Identifier of the template set baked into extract_features; stored in model
// files so stale models are rejected instead of silently mis-scoring.
std::string_view feature_template_set();

struct FeatureVector {
  std::vector<uint32_t> hashed;  // ids in [0, hash_dim), each with value 1
  uint32_t source_id = 0;
  std::vector<float> dense;
};

// FNV-1a over the feature name, reduced modulo dim.
uint32_t hash_feature(std::string_view name, uint64_t dim);

// Per-sentence cache of the taggable (regular-id) token positions.
std::vector<size_t> regular_token_indices(const Sentence& sentence);

// Extracts template features for sentence.tokens[token_index], which must be
// a regular token: lowercased form, prefixes/suffixes up to length 4, word
// shape, lowercased context forms within the window (boundary markers past
// the sentence edges), character trigrams.
FeatureVector extract_features(const FeatureConfig& config, const Sentence& sentence,
                               size_t token_index, uint32_t source_id,
                               std::span<const float> dense = {});

// Word shape: X for cased-uppercase, x for cased-lowercase, d for ASCII
// digits, other characters verbatim; runs longer than 3 collapse to 3.
std::string word_shape(const std::string& form);

}  // namespace lemma_engine
