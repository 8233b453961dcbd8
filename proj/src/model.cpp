#include "lemma_engine/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lemma_engine/unicode.hpp"

namespace lemma_engine {

namespace {

constexpr std::string_view kMagic = "LEMMA-ENGINE/1\n";

// ---- little-endian binary encoding ----

void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; i++) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; i++) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }

void put_string(std::string& out, std::string_view s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.append(s);
}

struct Reader {
  const std::string& data;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > data.size()) throw ModelError("truncated model file");
  }
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(data[pos++]);
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; i++)
      v |= static_cast<uint32_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; i++)
      v |= static_cast<uint64_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    uint32_t n = u32();
    need(n);
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

void put_weights(std::string& out, const std::vector<float>& weights,
                 uint64_t full_dim, size_t num_classes) {
  put_u64(out, full_dim);
  put_u32(out, static_cast<uint32_t>(num_classes));
  // all-zero rows are elided; training touches only features it has seen
  uint64_t nonzero_rows = 0;
  for (uint64_t row = 0; row < full_dim; row++) {
    const float* p = weights.data() + row * num_classes;
    for (size_t c = 0; c < num_classes; c++)
      if (p[c] != 0.0f) {
        nonzero_rows++;
        break;
      }
  }
  put_u64(out, nonzero_rows);
  for (uint64_t row = 0; row < full_dim; row++) {
    const float* p = weights.data() + row * num_classes;
    bool nonzero = false;
    for (size_t c = 0; c < num_classes; c++)
      if (p[c] != 0.0f) {
        nonzero = true;
        break;
      }
    if (!nonzero) continue;
    put_u64(out, row);
    for (size_t c = 0; c < num_classes; c++) put_f32(out, p[c]);
  }
}

std::vector<float> read_weights(Reader& in, uint64_t expect_dim,
                                size_t expect_classes) {
  uint64_t full_dim = in.u64();
  uint32_t num_classes = in.u32();
  if (full_dim != expect_dim || num_classes != expect_classes)
    throw ModelError("model file weight shape does not match its header");
  std::vector<float> weights(full_dim * num_classes, 0.0f);
  uint64_t nonzero_rows = in.u64();
  for (uint64_t i = 0; i < nonzero_rows; i++) {
    uint64_t row = in.u64();
    if (row >= full_dim) throw ModelError("model file weight row out of range");
    float* p = weights.data() + row * num_classes;
    for (size_t c = 0; c < num_classes; c++) p[c] = in.f32();
  }
  return weights;
}

}  // namespace

ModelParams init_params(FeatureConfig config, std::vector<std::string> upos_labels,
                        RuleInventory inventory, SourceMap source_map) {
  ModelParams params;
  params.config = config;
  params.upos_labels = std::move(upos_labels);
  params.inventory = std::move(inventory);
  params.source_map = std::move(source_map);
  params.upos_weights.assign(config.full_dim() * params.num_upos(), 0.0f);
  params.rule_weights.assign(config.full_dim() * params.num_rules(), 0.0f);
  return params;
}

void score_features(const FeatureConfig& config, const FeatureVector& fv,
                    const std::vector<float>& weights, std::span<float> scores) {
  size_t num_classes = scores.size();
  if (num_classes == 0) return;
  std::fill(scores.begin(), scores.end(), 0.0f);
  for (uint32_t f : fv.hashed) {
    const float* row = weights.data() + static_cast<uint64_t>(f) * num_classes;
    for (size_t c = 0; c < num_classes; c++) scores[c] += row[c];
  }
  {
    const float* row = weights.data() +
                       (config.hash_dim + fv.source_id) * num_classes;
    for (size_t c = 0; c < num_classes; c++) scores[c] += row[c];
  }
  for (size_t j = 0; j < fv.dense.size(); j++) {
    if (fv.dense[j] == 0.0f) continue;
    const float* row = weights.data() +
                       (config.hash_dim + config.num_sources + j) * num_classes;
    for (size_t c = 0; c < num_classes; c++) scores[c] += fv.dense[j] * row[c];
  }
}

std::vector<Prediction> predict_sentence(
    const ModelParams& params, const Sentence& sentence, uint32_t source_id,
    const std::vector<std::vector<float>>* ext) {
  if (source_id >= params.config.num_sources)
    throw ModelError("source id " + std::to_string(source_id) +
                     " out of range (model has " +
                     std::to_string(params.config.num_sources) + ")");
  if (params.config.dense_width > 0 && ext == nullptr)
    throw ModelError("model expects external vectors of width " +
                     std::to_string(params.config.dense_width) +
                     " but none were supplied");
  if (params.config.dense_width == 0 && ext != nullptr)
    throw ModelError("external vectors supplied to a model trained without them");
  if (ext && ext->size() != sentence.tokens.size())
    throw ModelError("external vectors are not aligned with the sentence");

  std::vector<Prediction> predictions;
  std::vector<float> upos_scores(params.num_upos());
  std::vector<float> rule_scores(params.num_rules());

  for (size_t i : regular_token_indices(sentence)) {
    const Token& token = sentence.tokens[i];
    std::span<const float> dense;
    if (ext) {
      if ((*ext)[i].size() != params.config.dense_width)
        throw ModelError("external vector width " + std::to_string((*ext)[i].size()) +
                         " does not match model dense width " +
                         std::to_string(params.config.dense_width));
      dense = (*ext)[i];
    }
    FeatureVector fv = extract_features(params.config, sentence, i, source_id, dense);

    Prediction pred;
    pred.token_index = i;

    if (!params.upos_labels.empty()) {
      score_features(params.config, fv, params.upos_weights, upos_scores);
      size_t best = 0;
      for (size_t c = 1; c < upos_scores.size(); c++)
        if (upos_scores[c] > upos_scores[best]) best = c;
      pred.upos = params.upos_labels[best];
      pred.upos_score = upos_scores[best];
    }

    size_t form_len = unicode::decode(token.form).size();
    bool found = false;
    size_t best_rule = 0;
    if (!params.inventory.entries.empty()) {
      score_features(params.config, fv, params.rule_weights, rule_scores);
      for (size_t c = 0; c < rule_scores.size(); c++) {
        const RuleEntry& entry = params.inventory.entries[c];
        bool applicable = entry.absolute ? form_len > 0 : entry.consumes <= form_len;
        if (!applicable) continue;
        if (!found || rule_scores[c] > rule_scores[best_rule]) {
          best_rule = c;
          found = true;
        }
      }
    }
    if (found) {
      pred.rule = params.inventory.entries[best_rule].rule;
      pred.rule_string = params.inventory.entries[best_rule].rule_string;
      pred.rule_score = rule_scores[best_rule];
    } else {
      pred.rule = identity_rule();
      pred.rule_string = format_rule(pred.rule);
      pred.rule_score = 0;
    }
    pred.lemma = apply_rule(pred.rule, token.form);
    predictions.push_back(std::move(pred));
  }
  return predictions;
}

void save_model(const ModelParams& params, const std::string& path) {
  std::string out;
  out.reserve(1 << 20);
  out.append(kMagic);

  put_u64(out, params.config.hash_dim);
  put_u32(out, params.config.window);
  put_u32(out, params.config.num_sources);
  put_u32(out, params.config.dense_width);
  put_u8(out, params.config.allow_copy ? 1 : 0);
  put_string(out, feature_template_set());

  put_u8(out, static_cast<uint8_t>(params.source_map.granularity));
  put_u32(out, static_cast<uint32_t>(params.source_map.entries.size()));
  for (const CorpusEntry& e : params.source_map.entries) {
    put_string(out, e.name);
    put_string(out, e.path);
    put_u8(out, e.group == CorpusGroup::Secondary ? 1 : 0);
    put_u8(out, e.author ? 1 : 0);
    if (e.author) put_string(out, *e.author);
    put_u8(out, e.vectors ? 1 : 0);
    if (e.vectors) put_string(out, *e.vectors);
  }

  put_u32(out, static_cast<uint32_t>(params.upos_labels.size()));
  for (const std::string& label : params.upos_labels) put_string(out, label);

  put_u32(out, static_cast<uint32_t>(params.inventory.entries.size()));
  for (const RuleEntry& entry : params.inventory.entries) {
    put_string(out, entry.rule_string);
    put_u64(out, entry.frequency);
    put_u32(out, static_cast<uint32_t>(entry.examples.size()));
    for (const RuleExample& ex : entry.examples) {
      put_string(out, ex.form);
      put_string(out, ex.lemma);
      put_u64(out, ex.count);
    }
  }

  put_weights(out, params.upos_weights, params.config.full_dim(), params.num_upos());
  put_weights(out, params.rule_weights, params.config.full_dim(), params.num_rules());

  std::ofstream file(path, std::ios::binary);
  if (!file) throw ModelError("cannot open model file for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw ModelError("failed to write model file: " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ModelError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  std::string data = buf.str();

  if (data.size() < kMagic.size() || data.compare(0, kMagic.size(), kMagic) != 0)
    throw ModelError(path + " is not a LEMMA-ENGINE/1 model file");
  Reader in{data, kMagic.size()};

  ModelParams params;
  params.config.hash_dim = in.u64();
  params.config.window = in.u32();
  params.config.num_sources = in.u32();
  params.config.dense_width = in.u32();
  params.config.allow_copy = in.u8() != 0;
  std::string templates = in.str();
  if (templates != feature_template_set())
    throw ModelError(path + " was built with feature templates '" + templates +
                     "', this binary uses '" + std::string(feature_template_set()) +
                     "'");

  uint8_t granularity = in.u8();
  if (granularity > static_cast<uint8_t>(Granularity::Merged))
    throw ModelError(path + ": invalid granularity");
  params.source_map.granularity = static_cast<Granularity>(granularity);
  uint32_t n_entries = in.u32();
  for (uint32_t i = 0; i < n_entries; i++) {
    CorpusEntry e;
    e.name = in.str();
    e.path = in.str();
    e.group = in.u8() ? CorpusGroup::Secondary : CorpusGroup::Primary;
    if (in.u8()) e.author = in.str();
    if (in.u8()) e.vectors = in.str();
    params.source_map.entries.push_back(std::move(e));
  }

  uint32_t n_upos = in.u32();
  for (uint32_t i = 0; i < n_upos; i++) params.upos_labels.push_back(in.str());

  uint32_t n_rules = in.u32();
  for (uint32_t i = 0; i < n_rules; i++) {
    RuleEntry entry;
    entry.rule_string = in.str();
    try {
      entry.rule = parse_rule(entry.rule_string);
    } catch (const RuleError& e) {
      throw ModelError(path + ": bad rule in inventory: " + e.what());
    }
    entry.frequency = in.u64();
    uint32_t n_ex = in.u32();
    for (uint32_t k = 0; k < n_ex; k++) {
      RuleExample ex;
      ex.form = in.str();
      ex.lemma = in.str();
      ex.count = in.u64();
      entry.examples.push_back(std::move(ex));
    }
    entry.absolute = entry.rule.edit.absolute;
    auto [cp, cs] = consumed_counts(entry.rule);
    entry.consumes = static_cast<uint32_t>(cp + cs);
    params.inventory.index.emplace(entry.rule_string, i);
    params.inventory.entries.push_back(std::move(entry));
  }

  params.upos_weights = read_weights(in, params.config.full_dim(), params.num_upos());
  params.rule_weights = read_weights(in, params.config.full_dim(), params.num_rules());
  if (in.pos != data.size())
    throw ModelError(path + ": trailing bytes after model payload");
  return params;
}

}  // namespace lemma_engine
