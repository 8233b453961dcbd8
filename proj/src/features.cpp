#include "lemma_engine/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "lemma_engine/unicode.hpp"

namespace lemma_engine {

namespace {

constexpr std::string_view kBosMarker = "<s>";
constexpr std::string_view kEosMarker = "</s>";

}  // namespace

std::string_view feature_template_set() {
  return "form|affix1-4|shape3|context|trigram";
}

uint32_t hash_feature(std::string_view name, uint64_t dim) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return static_cast<uint32_t>(h % dim);
}

std::vector<size_t> regular_token_indices(const Sentence& sentence) {
  std::vector<size_t> indices;
  indices.reserve(sentence.tokens.size());
  for (size_t i = 0; i < sentence.tokens.size(); i++)
    if (sentence.tokens[i].is_regular()) indices.push_back(i);
  return indices;
}

std::string word_shape(const std::string& form) {
  std::string shape;
  std::string last_class;
  int run = 0;
  for (char32_t c : unicode::decode(form)) {
    std::string cls;
    if (unicode::is_upper(c)) {
      cls = "X";
    } else if (unicode::is_lower_cased(c)) {
      cls = "x";
    } else if (c >= U'0' && c <= U'9') {
      cls = "d";
    } else {
      unicode::append(cls, c);
    }
    if (cls == last_class) {
      if (++run > 3) continue;
    } else {
      last_class = cls;
      run = 1;
    }
    shape += cls;
  }
  return shape;
}

FeatureVector extract_features(const FeatureConfig& config, const Sentence& sentence,
                               size_t token_index, uint32_t source_id,
                               std::span<const float> dense) {
  if (token_index >= sentence.tokens.size() ||
      !sentence.tokens[token_index].is_regular())
    throw std::invalid_argument("extract_features requires a regular token index");
  if (source_id >= config.num_sources)
    throw std::invalid_argument("source id out of range");

  const std::vector<size_t> regular = regular_token_indices(sentence);
  size_t pos = std::find(regular.begin(), regular.end(), token_index) - regular.begin();

  FeatureVector fv;
  fv.source_id = source_id;
  fv.dense.assign(dense.begin(), dense.end());

  std::string buf;
  auto add = [&](std::string_view name) {
    fv.hashed.push_back(hash_feature(name, config.hash_dim));
  };

  const std::string& form = sentence.tokens[token_index].form;
  std::string lower = unicode::lowercase(form);
  std::vector<char32_t> chars = unicode::decode(lower);

  buf = "f:";
  buf += lower;
  add(buf);

  for (size_t k = 1; k <= 4 && k <= chars.size(); k++) {
    buf = "p";
    buf += static_cast<char>('0' + k);
    buf += ':';
    for (size_t i = 0; i < k; i++) unicode::append(buf, chars[i]);
    add(buf);
    buf = "s";
    buf += static_cast<char>('0' + k);
    buf += ':';
    for (size_t i = chars.size() - k; i < chars.size(); i++)
      unicode::append(buf, chars[i]);
    add(buf);
  }

  buf = "sh:";
  buf += word_shape(form);
  add(buf);

  for (int off = -static_cast<int>(config.window);
       off <= static_cast<int>(config.window); off++) {
    if (off == 0) continue;
    buf = "c";
    buf += std::to_string(off);
    buf += ':';
    long neighbor = static_cast<long>(pos) + off;
    if (neighbor < 0) {
      buf += kBosMarker;
    } else if (neighbor >= static_cast<long>(regular.size())) {
      buf += kEosMarker;
    } else {
      buf += unicode::lowercase(sentence.tokens[regular[neighbor]].form);
    }
    add(buf);
  }

  if (chars.size() >= 3) {
    for (size_t i = 0; i + 3 <= chars.size(); i++) {
      buf = "t:";
      for (size_t k = 0; k < 3; k++) unicode::append(buf, chars[i + k]);
      add(buf);
    }
  }

  return fv;
}

}  // namespace lemma_engine
