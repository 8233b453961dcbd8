#pragma once

// Deterministic single-threaded trainer for the joint classifier, plus the
// most-frequent-per-form baseline used as a sanity yardstick.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lemma_engine/model.hpp"

namespace lemma_engine {

struct TrainingError : std::runtime_error {
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

struct Hyperparams {
  uint32_t epochs = 10;
  double learning_rate = 0.1;  // decays linearly toward 0 across epochs
  uint64_t seed = 42;
  double dev_fraction = 0.1;
  uint64_t hash_dim = 1ull << 20;
  uint32_t window = 2;
  bool allow_copy = false;  // must match the training set's rule encoding
};

struct EpochStats {
  double loss = 0;
  double dev_lemma_accuracy = 0;  // percent; 0 when the dev set is empty
  double dev_upos_accuracy = 0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  uint32_t best_epoch = 0;  // 0-based
};

// Multinomial logistic regression per head over shared features, plain SGD,
// per-epoch sentence shuffling driven solely by hp.seed. Returns the
// parameters of the epoch with the best dev lemma accuracy (ties toward the
// later epoch; the last epoch when the dev split is empty). Bit-identical
// for identical (ts, hp). `progress`, when given, receives one line per epoch.
ModelParams train(const TrainingSet& ts, const Hyperparams& hp,
                  TrainLog* log = nullptr, std::ostream* progress = nullptr);

struct BaselineModel {
  struct FormStats {
    std::optional<uint32_t> rule_id;
    std::optional<uint32_t> upos_id;
  };
  std::unordered_map<std::string, FormStats> forms;  // keyed by lowercased form
  RuleInventory inventory;
  std::vector<std::string> upos_labels;
  std::optional<uint32_t> global_upos;
};

// Memorizes the most frequent lemma rule and UPOS per lowercased form (ties
// toward the lower class id). Unseen forms fall back to the identity rule and
// the globally most frequent UPOS.
BaselineModel baseline_most_frequent(const TrainingSet& ts);

// Baseline predictions for every regular token (scores are left at zero).
std::vector<Prediction> baseline_predict_sentence(const BaselineModel& bm,
                                                  const Sentence& sentence);

}  // namespace lemma_engine
