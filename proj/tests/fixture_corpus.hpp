#pragma once

// Deterministic synthetic corpus of regular Latin-like paradigms, used by the
// training, evaluation and acceptance tests. Word forms follow fixed
// declension/conjugation endings, so every (form, lemma) pair is covered by a
// small set of suffix rules; a few homograph forms are resolvable only from
// context, which keeps a per-form memorization baseline strictly below the
// ceiling. Secondary "treebank" profiles diverge in annotation conventions
// (proper nouns tagged NOUN with lowercased lemmas).

#include <cstdint>
#include <string>
#include <vector>

#include "lemma_engine/conllu.hpp"

namespace fixture {

struct Profile {
  std::string name;
  std::string author;   // empty for secondary corpora
  bool secondary = false;
  int style = 0;        // shifts template and stem preferences
  size_t sentences = 260;
  uint64_t seed = 7;
};

lemma_engine::Document generate_corpus(const Profile& profile);

// The standard five-corpus fixture: three primary authors, two secondary
// treebanks (~6k tokens in total).
std::vector<Profile> default_profiles();

struct Layout {
  std::string dir;
  std::string config_path;                // corpus config JSON
  std::vector<std::string> corpus_paths;  // parallel to profiles
};

// Writes the corpora plus a corpus config JSON under dir (created if needed).
Layout write_fixture(const std::string& dir, const std::vector<Profile>& profiles,
                     const std::string& granularity = "per-author-per-treebank");

}  // namespace fixture
