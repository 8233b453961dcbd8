#include "lemma_engine/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lemma_engine/unicode.hpp"
#include "lemma_engine/vectors.hpp"

namespace lemma_engine {

namespace {

namespace fs = std::filesystem;

// Seed of the fixed generator that samples the generic-id replay.
constexpr uint64_t kReplaySeed = 0x5eedu;
constexpr double kReplayFraction = 0.05;

// Deterministic Fisher-Yates; std::shuffle is implementation-defined.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; i--) {
    size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::string> primary_author_keys(const SourceMap& map) {
  std::vector<std::string> keys;
  for (const CorpusEntry& e : map.entries) {
    if (e.group != CorpusGroup::Primary) continue;
    const std::string& key = e.author ? *e.author : e.name;
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  return keys;
}

std::vector<std::string> secondary_names(const SourceMap& map) {
  std::vector<std::string> names;
  for (const CorpusEntry& e : map.entries)
    if (e.group == CorpusGroup::Secondary) names.push_back(e.name);
  return names;
}

bool has_group(const SourceMap& map, CorpusGroup g) {
  for (const CorpusEntry& e : map.entries)
    if (e.group == g) return true;
  return false;
}

uint32_t index_of(const std::vector<std::string>& v, const std::string& s) {
  return static_cast<uint32_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

}  // namespace

Granularity granularity_from_string(const std::string& s) {
  if (s == "per-author-per-treebank") return Granularity::PerAuthorPerTreebank;
  if (s == "single-primary-per-treebank") return Granularity::SinglePrimaryPerTreebank;
  if (s == "single-primary-single-secondary")
    return Granularity::SinglePrimarySingleSecondary;
  if (s == "merged") return Granularity::Merged;
  throw CorpusError("unknown granularity '" + s + "'");
}

std::string to_string(Granularity g) {
  switch (g) {
    case Granularity::PerAuthorPerTreebank: return "per-author-per-treebank";
    case Granularity::SinglePrimaryPerTreebank: return "single-primary-per-treebank";
    case Granularity::SinglePrimarySingleSecondary:
      return "single-primary-single-secondary";
    case Granularity::Merged: return "merged";
  }
  return "?";
}

SourceMap parse_source_map(const std::string& json_text, const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError(std::string("corpus config is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("corpora") || !j["corpora"].is_array())
    throw CorpusError("corpus config must be an object with a \"corpora\" array");

  SourceMap map;
  if (j.contains("granularity"))
    map.granularity = granularity_from_string(j["granularity"].get<std::string>());

  for (const auto& c : j["corpora"]) {
    CorpusEntry entry;
    if (!c.contains("name") || !c.contains("path"))
      throw CorpusError("every corpus entry needs \"name\" and \"path\"");
    entry.name = c["name"].get<std::string>();
    entry.path = c["path"].get<std::string>();
    if (!base_dir.empty() && fs::path(entry.path).is_relative())
      entry.path = (fs::path(base_dir) / entry.path).string();
    std::string group = c.value("group", std::string("primary"));
    if (group == "primary") {
      entry.group = CorpusGroup::Primary;
    } else if (group == "secondary") {
      entry.group = CorpusGroup::Secondary;
    } else {
      throw CorpusError("corpus group must be \"primary\" or \"secondary\", got '" +
                        group + "'");
    }
    if (c.contains("author") && !c["author"].is_null())
      entry.author = c["author"].get<std::string>();
    if (c.contains("vectors") && !c["vectors"].is_null()) {
      entry.vectors = c["vectors"].get<std::string>();
      if (!base_dir.empty() && fs::path(*entry.vectors).is_relative())
        entry.vectors = (fs::path(base_dir) / *entry.vectors).string();
    }
    for (const CorpusEntry& existing : map.entries)
      if (existing.name == entry.name)
        throw CorpusError("duplicate corpus name '" + entry.name + "'");
    map.entries.push_back(std::move(entry));
  }
  return map;
}

SourceMap load_source_map(const std::string& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus config: " + json_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_source_map(buf.str(), fs::path(json_path).parent_path().string());
}

uint32_t source_id_count(const SourceMap& map) {
  uint32_t primary = has_group(map, CorpusGroup::Primary) ? 1 : 0;
  uint32_t secondary = static_cast<uint32_t>(secondary_names(map).size());
  switch (map.granularity) {
    case Granularity::Merged:
      return 1;
    case Granularity::SinglePrimarySingleSecondary:
      return primary + (secondary ? 1 : 0);
    case Granularity::SinglePrimaryPerTreebank:
      return primary + secondary;
    case Granularity::PerAuthorPerTreebank:
      return static_cast<uint32_t>(primary_author_keys(map).size()) + secondary;
  }
  return 1;
}

uint32_t unknown_source_id(const SourceMap& map) {
  return map.granularity == Granularity::Merged ? 0 : source_id_count(map);
}

uint32_t total_source_ids(const SourceMap& map) {
  return map.granularity == Granularity::Merged ? 1 : source_id_count(map) + 1;
}

uint32_t resolve_source_id(const SourceMap& map, const std::string& corpus_name,
                           const std::optional<std::string>& author) {
  const CorpusEntry* entry = nullptr;
  for (const CorpusEntry& e : map.entries)
    if (e.name == corpus_name) {
      entry = &e;
      break;
    }
  if (!entry) throw CorpusError("unknown corpus name '" + corpus_name + "'");

  switch (map.granularity) {
    case Granularity::Merged:
      return 0;
    case Granularity::SinglePrimarySingleSecondary:
      if (entry->group == CorpusGroup::Primary) return 0;
      return has_group(map, CorpusGroup::Primary) ? 1 : 0;
    case Granularity::SinglePrimaryPerTreebank: {
      uint32_t base = has_group(map, CorpusGroup::Primary) ? 1 : 0;
      if (entry->group == CorpusGroup::Primary) return 0;
      return base + index_of(secondary_names(map), entry->name);
    }
    case Granularity::PerAuthorPerTreebank: {
      std::vector<std::string> authors = primary_author_keys(map);
      if (entry->group == CorpusGroup::Secondary)
        return static_cast<uint32_t>(authors.size()) +
               index_of(secondary_names(map), entry->name);
      std::string key = author ? *author : (entry->author ? *entry->author : entry->name);
      uint32_t idx = index_of(authors, key);
      if (idx == authors.size()) return unknown_source_id(map);
      return idx;
    }
  }
  return 0;
}

uint32_t resolve_source_or_unknown(const SourceMap& map,
                                   const std::optional<std::string>& key) {
  if (!key) return unknown_source_id(map);
  for (const CorpusEntry& e : map.entries)
    if (e.name == *key) return resolve_source_id(map, *key);
  // not a corpus name; try primary authors
  std::vector<std::string> authors = primary_author_keys(map);
  uint32_t idx = index_of(authors, *key);
  if (idx == authors.size()) return unknown_source_id(map);
  switch (map.granularity) {
    case Granularity::PerAuthorPerTreebank:
      return idx;
    case Granularity::Merged:
      return 0;
    default:
      return 0;  // all primary data shares id 0
  }
}

std::optional<uint32_t> RuleInventory::find(const std::string& rule_string) const {
  auto it = index.find(rule_string);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

bool RuleInventory::operator==(const RuleInventory& other) const {
  return entries == other.entries;  // index is derived
}

RuleInventory build_rule_inventory(
    const std::vector<std::pair<std::string, std::string>>& form_lemma_pairs,
    bool allow_copy) {
  RuleInventory inv;
  // per entry: distinct (form, lemma) pairs in first-seen order, with counts
  std::vector<std::vector<RuleExample>> pairs;
  std::vector<std::unordered_map<std::string, size_t>> pair_index;

  for (const auto& [form, lemma] : form_lemma_pairs) {
    if (form.empty() || lemma.empty()) continue;
    LemmaRule rule = encode_rule(form, lemma, allow_copy);
    std::string rule_string = format_rule(rule);
    auto it = inv.index.find(rule_string);
    uint32_t id;
    if (it == inv.index.end()) {
      id = static_cast<uint32_t>(inv.entries.size());
      inv.index.emplace(rule_string, id);
      RuleEntry entry;
      entry.rule = std::move(rule);
      entry.rule_string = rule_string;
      entry.absolute = entry.rule.edit.absolute;
      auto [cp, cs] = consumed_counts(entry.rule);
      entry.consumes = static_cast<uint32_t>(cp + cs);
      inv.entries.push_back(std::move(entry));
      pairs.emplace_back();
      pair_index.emplace_back();
    } else {
      id = it->second;
    }
    inv.entries[id].frequency++;
    std::string key = form + '\t' + lemma;
    auto pit = pair_index[id].find(key);
    if (pit == pair_index[id].end()) {
      pair_index[id].emplace(std::move(key), pairs[id].size());
      pairs[id].push_back({form, lemma, 1});
    } else {
      pairs[id][pit->second].count++;
    }
  }

  // attach the five most frequent example pairs (ties by first occurrence)
  for (size_t id = 0; id < inv.entries.size(); id++) {
    std::vector<RuleExample>& ex = pairs[id];
    std::stable_sort(ex.begin(), ex.end(),
                     [](const RuleExample& a, const RuleExample& b) {
                       return a.count > b.count;
                     });
    if (ex.size() > 5) ex.resize(5);
    inv.entries[id].examples = std::move(ex);
  }

  std::stable_sort(inv.entries.begin(), inv.entries.end(),
                   [](const RuleEntry& a, const RuleEntry& b) {
                     return a.frequency > b.frequency;
                   });
  inv.index.clear();
  for (uint32_t id = 0; id < inv.entries.size(); id++)
    inv.index.emplace(inv.entries[id].rule_string, id);
  return inv;
}

std::vector<RuleEntry> top_rules(const RuleInventory& inv, size_t k) {
  size_t n = std::min(k, inv.entries.size());
  return {inv.entries.begin(), inv.entries.begin() + n};
}

bool usable_for_lemma(const Token& token) {
  return token.is_regular() && token.lemma.has_value() && !token.form.empty();
}

bool usable_for_upos(const Token& token) {
  return token.is_regular() && token.upos.has_value() && !token.form.empty();
}

TrainingSet make_training_set(std::vector<TrainingSentence> sentences,
                              SourceMap source_map, bool allow_copy,
                              uint32_t dense_width,
                              std::vector<std::vector<std::vector<float>>> ext) {
  TrainingSet ts;
  ts.sentences = std::move(sentences);
  ts.source_map = std::move(source_map);
  ts.allow_copy = allow_copy;
  ts.dense_width = dense_width;
  ts.ext_vectors = std::move(ext);

  std::vector<std::pair<std::string, std::string>> pairs;
  std::unordered_map<std::string, bool> seen_upos;
  for (const TrainingSentence& s : ts.sentences) {
    for (const Token& token : s.sentence.tokens) {
      if (usable_for_lemma(token)) {
        pairs.emplace_back(token.form, *token.lemma);
        ts.usable_lemma_tokens++;
      }
      if (usable_for_upos(token)) {
        ts.usable_upos_tokens++;
        if (seen_upos.emplace(*token.upos, true).second)
          ts.upos_labels.push_back(*token.upos);
      }
    }
  }
  ts.inventory = build_rule_inventory(pairs, allow_copy);
  return ts;
}

TrainingSet load_corpora(const SourceMap& config, const LoadOptions& opts) {
  if (config.entries.empty()) throw CorpusError("empty corpus set");

  std::vector<TrainingSentence> sentences;
  std::vector<std::vector<std::vector<float>>> ext;
  std::vector<size_t> primary_indices;
  uint32_t dense_width = 0;
  bool want_vectors = opts.vectors_dir.has_value();
  for (const CorpusEntry& e : config.entries)
    want_vectors = want_vectors || e.vectors.has_value();

  for (const CorpusEntry& entry : config.entries) {
    Document doc;
    try {
      doc = parse_file(entry.path);
    } catch (const std::exception& ex) {
      throw CorpusError("cannot load corpus '" + entry.name + "' (" + entry.path +
                        "): " + ex.what());
    }
    uint32_t sid = resolve_source_id(config, entry.name);

    std::vector<std::vector<std::vector<float>>> vecs;
    if (want_vectors) {
      std::string vec_path;
      if (entry.vectors) {
        vec_path = *entry.vectors;
      } else if (opts.vectors_dir) {
        vec_path = (fs::path(*opts.vectors_dir) / (entry.name + ".vec")).string();
      } else {
        throw CorpusError("corpus '" + entry.name +
                          "' has no vector sidecar but other corpora do");
      }
      ExternalVectors ev = load_vectors(vec_path);
      check_alignment(ev, doc, vec_path);
      if (dense_width == 0) dense_width = ev.width;
      if (ev.width != dense_width)
        throw CorpusError("vector width mismatch across corpora: " + vec_path);
      vecs = std::move(ev.sentences);
    }

    for (size_t i = 0; i < doc.sentences.size(); i++) {
      if (entry.group == CorpusGroup::Primary)
        primary_indices.push_back(sentences.size());
      sentences.push_back({std::move(doc.sentences[i]), sid});
      if (want_vectors) ext.push_back(std::move(vecs[i]));
    }
  }

  // Replay a deterministic 5% sample of primary sentences under the reserved
  // generic id so out-of-domain prediction has trained weights.
  if (config.granularity != Granularity::Merged) {
    size_t count = primary_indices.size() / 20;
    if (count > 0) {
      std::mt19937_64 rng(kReplaySeed);
      std::vector<size_t> sample = primary_indices;
      deterministic_shuffle(sample, rng);
      sample.resize(count);
      std::sort(sample.begin(), sample.end());
      uint32_t generic = unknown_source_id(config);
      for (size_t idx : sample) {
        sentences.push_back({sentences[idx].sentence, generic});
        if (want_vectors) ext.push_back(ext[idx]);
      }
    }
  }

  return make_training_set(std::move(sentences), config, opts.allow_copy,
                           dense_width, std::move(ext));
}

std::pair<TrainingSet, TrainingSet> split(const TrainingSet& ts,
                                          double dev_fraction, uint64_t seed) {
  if (dev_fraction < 0.0 || dev_fraction >= 1.0)
    throw std::invalid_argument("dev_fraction must be in [0, 1)");

  std::map<uint32_t, std::vector<size_t>> by_source;
  for (size_t i = 0; i < ts.sentences.size(); i++)
    by_source[ts.sentences[i].source_id].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<bool> in_dev(ts.sentences.size(), false);
  for (auto& [sid, indices] : by_source) {
    size_t n = indices.size();
    size_t k = static_cast<size_t>(std::floor(dev_fraction * n + 1e-9));
    if (k == 0 && dev_fraction > 0.0 && n >= 2) k = 1;
    deterministic_shuffle(indices, rng);
    for (size_t i = 0; i < k; i++) in_dev[indices[i]] = true;
  }

  std::vector<TrainingSentence> train_sentences, dev_sentences;
  std::vector<std::vector<std::vector<float>>> train_ext, dev_ext;
  bool has_ext = !ts.ext_vectors.empty();
  for (size_t i = 0; i < ts.sentences.size(); i++) {
    if (in_dev[i]) {
      dev_sentences.push_back(ts.sentences[i]);
      if (has_ext) dev_ext.push_back(ts.ext_vectors[i]);
    } else {
      train_sentences.push_back(ts.sentences[i]);
      if (has_ext) train_ext.push_back(ts.ext_vectors[i]);
    }
  }
  return {make_training_set(std::move(train_sentences), ts.source_map, ts.allow_copy,
                            ts.dense_width, std::move(train_ext)),
          make_training_set(std::move(dev_sentences), ts.source_map, ts.allow_copy,
                            ts.dense_width, std::move(dev_ext))};
}

}  // namespace lemma_engine
