#pragma once

// The joint two-head token classifier: one shared feature vector per token
// feeds a UPOS softmax head and a lemma-rule softmax head. Parameters are
// immutable after training and serialize bit-stably.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lemma_engine/corpus.hpp"
#include "lemma_engine/features.hpp"

namespace lemma_engine {

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelParams {
  FeatureConfig config;
  std::vector<std::string> upos_labels;  // class id = position
  RuleInventory inventory;               // class id = position
  SourceMap source_map;                  // embedded for predict-time resolution

  // Row-major [full_dim][num_classes]: the row of a feature id is contiguous
  // over classes, so sparse scoring and updates touch whole rows.
  std::vector<float> upos_weights;
  std::vector<float> rule_weights;

  size_t num_upos() const { return upos_labels.size(); }
  size_t num_rules() const { return inventory.entries.size(); }

  bool operator==(const ModelParams&) const = default;
};

// Zero-initialized weights for the given spaces.
ModelParams init_params(FeatureConfig config, std::vector<std::string> upos_labels,
                        RuleInventory inventory, SourceMap source_map);

struct Prediction {
  size_t token_index;  // into sentence.tokens
  std::string upos;
  LemmaRule rule;
  std::string rule_string;
  std::string lemma;
  float upos_score = 0;
  float rule_score = 0;
};

// Adds W's rows for the active features of fv into scores (length
// num_classes).
void score_features(const FeatureConfig& config, const FeatureVector& fv,
                    const std::vector<float>& weights, std::span<float> scores);

// Predicts both heads for every regular token. The lemma-rule argmax is
// restricted to rules applicable to the token's form, falling back to the
// identity rule when nothing applies; ties break toward lower class ids.
// `ext` supplies per-token dense vectors aligned with sentence.tokens and is
// required exactly when the model was trained with a dense block.
std::vector<Prediction> predict_sentence(
    const ModelParams& params, const Sentence& sentence, uint32_t source_id,
    const std::vector<std::vector<float>>* ext = nullptr);

// Model file: "LEMMA-ENGINE/1" magic, feature config, label spaces, source
// map, rule inventory and little-endian float32 weights (all-zero rows
// elided). load(save(p)) == p.
void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace lemma_engine
