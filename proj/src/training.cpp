#include "lemma_engine/training.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "lemma_engine/unicode.hpp"

namespace lemma_engine {

namespace {

// Deterministic Fisher-Yates; std::shuffle is implementation-defined.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; i--) {
    size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

struct TrainItem {
  FeatureVector features;
  int32_t upos_class = -1;
  int32_t rule_class = -1;
};

// softmax in place; returns -log p[target]
double softmax_loss(std::vector<float>& scores, size_t target) {
  float max = scores[0];
  for (float s : scores) max = std::max(max, s);
  float sum = 0;
  for (float& s : scores) {
    s = std::exp(s - max);
    sum += s;
  }
  for (float& s : scores) s /= sum;
  return -std::log(std::max(static_cast<double>(scores[target]), 1e-30));
}

void sgd_update(const FeatureConfig& config, const FeatureVector& fv,
                std::vector<float>& weights, const std::vector<float>& probs,
                size_t target, float lr) {
  size_t num_classes = probs.size();
  std::vector<float> delta(num_classes);
  for (size_t c = 0; c < num_classes; c++)
    delta[c] = lr * (probs[c] - (c == target ? 1.0f : 0.0f));

  for (uint32_t f : fv.hashed) {
    float* row = weights.data() + static_cast<uint64_t>(f) * num_classes;
    for (size_t c = 0; c < num_classes; c++) row[c] -= delta[c];
  }
  {
    float* row = weights.data() + (config.hash_dim + fv.source_id) * num_classes;
    for (size_t c = 0; c < num_classes; c++) row[c] -= delta[c];
  }
  for (size_t j = 0; j < fv.dense.size(); j++) {
    if (fv.dense[j] == 0.0f) continue;
    float* row = weights.data() +
                 (config.hash_dim + config.num_sources + j) * num_classes;
    for (size_t c = 0; c < num_classes; c++) row[c] -= fv.dense[j] * delta[c];
  }
}

struct DevAccuracy {
  double lemma = 0;
  double upos = 0;
};

DevAccuracy dev_accuracy(const ModelParams& params, const TrainingSet& dev) {
  uint64_t lemma_scored = 0, lemma_correct = 0;
  uint64_t upos_scored = 0, upos_correct = 0;
  for (size_t si = 0; si < dev.sentences.size(); si++) {
    const TrainingSentence& ts = dev.sentences[si];
    const std::vector<std::vector<float>>* ext =
        dev.ext_vectors.empty() ? nullptr : &dev.ext_vectors[si];
    std::vector<Prediction> preds =
        predict_sentence(params, ts.sentence, ts.source_id, ext);
    for (const Prediction& pred : preds) {
      const Token& token = ts.sentence.tokens[pred.token_index];
      if (usable_for_lemma(token)) {
        lemma_scored++;
        if (pred.lemma == *token.lemma) lemma_correct++;
      }
      if (usable_for_upos(token)) {
        upos_scored++;
        if (pred.upos == *token.upos) upos_correct++;
      }
    }
  }
  DevAccuracy acc;
  if (lemma_scored) acc.lemma = 100.0 * lemma_correct / lemma_scored;
  if (upos_scored) acc.upos = 100.0 * upos_correct / upos_scored;
  return acc;
}

}  // namespace

ModelParams train(const TrainingSet& full, const Hyperparams& hp,
                  TrainLog* log, std::ostream* progress) {
  if (full.sentences.empty()) throw TrainingError("empty training data");
  if (full.inventory.entries.empty())
    throw TrainingError("training data has no usable (form, lemma) pairs");
  if (hp.epochs < 1) throw TrainingError("epochs must be >= 1");
  if (hp.learning_rate <= 0) throw TrainingError("learning rate must be positive");
  if (hp.allow_copy != full.allow_copy)
    throw TrainingError("hyperparameter allow_copy does not match the training set");

  auto [train_part, dev_part] = split(full, hp.dev_fraction, hp.seed);
  if (train_part.sentences.empty())
    throw TrainingError("training split is empty; lower dev_fraction");

  FeatureConfig config;
  config.hash_dim = hp.hash_dim;
  config.window = hp.window;
  config.num_sources = total_source_ids(full.source_map);
  config.dense_width = full.dense_width;
  config.allow_copy = full.allow_copy;

  ModelParams params = init_params(config, train_part.upos_labels,
                                   train_part.inventory, full.source_map);

  // Features are static; extract once per token.
  std::vector<std::vector<TrainItem>> items(train_part.sentences.size());
  std::unordered_map<std::string, uint32_t> upos_index;
  for (uint32_t c = 0; c < params.upos_labels.size(); c++)
    upos_index.emplace(params.upos_labels[c], c);

  for (size_t si = 0; si < train_part.sentences.size(); si++) {
    const TrainingSentence& ts = train_part.sentences[si];
    const std::vector<std::vector<float>>* ext =
        train_part.ext_vectors.empty() ? nullptr : &train_part.ext_vectors[si];
    for (size_t i : regular_token_indices(ts.sentence)) {
      const Token& token = ts.sentence.tokens[i];
      if (token.form.empty()) continue;
      TrainItem item;
      std::span<const float> dense;
      if (ext) dense = (*ext)[i];
      item.features = extract_features(config, ts.sentence, i, ts.source_id, dense);
      if (usable_for_upos(token)) {
        auto it = upos_index.find(*token.upos);
        if (it != upos_index.end()) item.upos_class = static_cast<int32_t>(it->second);
      }
      if (usable_for_lemma(token)) {
        LemmaRule rule = encode_rule(token.form, *token.lemma, full.allow_copy);
        if (auto id = params.inventory.find(format_rule(rule)))
          item.rule_class = static_cast<int32_t>(*id);
      }
      if (item.upos_class >= 0 || item.rule_class >= 0)
        items[si].push_back(std::move(item));
    }
  }

  std::mt19937_64 rng(hp.seed);
  std::vector<size_t> order(items.size());
  for (size_t i = 0; i < order.size(); i++) order[i] = i;

  std::vector<float> upos_scores(params.num_upos());
  std::vector<float> rule_scores(params.num_rules());

  std::vector<float> best_upos_weights, best_rule_weights;
  DevAccuracy best{-1, -1};
  uint32_t best_epoch = 0;
  if (log) *log = TrainLog{};

  for (uint32_t epoch = 0; epoch < hp.epochs; epoch++) {
    float lr = static_cast<float>(hp.learning_rate *
                                  (hp.epochs - epoch) / hp.epochs);
    deterministic_shuffle(order, rng);

    double loss = 0;
    for (size_t si : order) {
      for (const TrainItem& item : items[si]) {
        if (item.upos_class >= 0 && !upos_scores.empty()) {
          score_features(config, item.features, params.upos_weights, upos_scores);
          loss += softmax_loss(upos_scores, item.upos_class);
          sgd_update(config, item.features, params.upos_weights, upos_scores,
                     item.upos_class, lr);
        }
        if (item.rule_class >= 0) {
          score_features(config, item.features, params.rule_weights, rule_scores);
          loss += softmax_loss(rule_scores, item.rule_class);
          sgd_update(config, item.features, params.rule_weights, rule_scores,
                     item.rule_class, lr);
        }
      }
    }

    DevAccuracy acc = dev_accuracy(params, dev_part);
    if (progress)
      *progress << "epoch " << (epoch + 1) << "/" << hp.epochs << " loss "
                << loss << " dev lemma " << acc.lemma << " dev upos " << acc.upos
                << "\n";
    if (log) log->epochs.push_back({loss, acc.lemma, acc.upos});

    if (acc.lemma >= best.lemma) {
      best = acc;
      best_epoch = epoch;
      best_upos_weights = params.upos_weights;
      best_rule_weights = params.rule_weights;
    }
  }

  if (log) log->best_epoch = best_epoch;
  params.upos_weights = std::move(best_upos_weights);
  params.rule_weights = std::move(best_rule_weights);
  return params;
}

BaselineModel baseline_most_frequent(const TrainingSet& ts) {
  if (ts.sentences.empty()) throw TrainingError("empty training data");

  BaselineModel bm;
  bm.inventory = ts.inventory;
  bm.upos_labels = ts.upos_labels;
  std::unordered_map<std::string, uint32_t> upos_index;
  for (uint32_t c = 0; c < bm.upos_labels.size(); c++)
    upos_index.emplace(bm.upos_labels[c], c);

  // per lowercased form: counts per rule class and per upos class
  struct Counts {
    std::unordered_map<uint32_t, uint64_t> rules;
    std::unordered_map<uint32_t, uint64_t> upos;
  };
  std::unordered_map<std::string, Counts> counts;
  std::vector<uint64_t> global_upos(bm.upos_labels.size(), 0);

  for (const TrainingSentence& s : ts.sentences) {
    for (const Token& token : s.sentence.tokens) {
      if (!token.is_regular() || token.form.empty()) continue;
      std::string lower = unicode::lowercase(token.form);
      if (usable_for_lemma(token)) {
        LemmaRule rule = encode_rule(token.form, *token.lemma, ts.allow_copy);
        if (auto id = bm.inventory.find(format_rule(rule)))
          counts[lower].rules[*id]++;
      }
      if (usable_for_upos(token)) {
        auto it = upos_index.find(*token.upos);
        if (it != upos_index.end()) {
          counts[lower].upos[it->second]++;
          global_upos[it->second]++;
        }
      }
    }
  }

  auto argmax = [](const std::unordered_map<uint32_t, uint64_t>& m)
      -> std::optional<uint32_t> {
    std::optional<uint32_t> best;
    uint64_t best_count = 0;
    for (const auto& [id, count] : m) {
      if (count > best_count || (count == best_count && best && id < *best)) {
        best = id;
        best_count = count;
      }
    }
    return best;
  };

  for (auto& [form, c] : counts) {
    BaselineModel::FormStats stats;
    stats.rule_id = argmax(c.rules);
    stats.upos_id = argmax(c.upos);
    bm.forms.emplace(form, stats);
  }

  uint64_t best_count = 0;
  for (uint32_t c = 0; c < global_upos.size(); c++)
    if (global_upos[c] > best_count) {
      best_count = global_upos[c];
      bm.global_upos = c;
    }
  return bm;
}

std::vector<Prediction> baseline_predict_sentence(const BaselineModel& bm,
                                                  const Sentence& sentence) {
  std::vector<Prediction> predictions;
  for (size_t i : regular_token_indices(sentence)) {
    const Token& token = sentence.tokens[i];
    Prediction pred;
    pred.token_index = i;

    std::optional<uint32_t> rule_id, upos_id;
    auto it = bm.forms.find(unicode::lowercase(token.form));
    if (it != bm.forms.end()) {
      rule_id = it->second.rule_id;
      upos_id = it->second.upos_id;
    }
    if (rule_id) {
      const RuleEntry& entry = bm.inventory.entries[*rule_id];
      pred.rule = entry.rule;
      pred.rule_string = entry.rule_string;
    } else {
      pred.rule = identity_rule();
      pred.rule_string = format_rule(pred.rule);
    }
    pred.lemma = apply_rule(pred.rule, token.form);
    if (!upos_id) upos_id = bm.global_upos;
    if (upos_id) pred.upos = bm.upos_labels[*upos_id];
    predictions.push_back(std::move(pred));
  }
  return predictions;
}

}  // namespace lemma_engine
