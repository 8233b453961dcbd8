#include "fixture_corpus.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include "lemma_engine/unicode.hpp"

namespace fixture {

namespace {

namespace fs = std::filesystem;
using lemma_engine::Document;
using lemma_engine::Sentence;
using lemma_engine::Token;

struct Word {
  std::string form;
  std::string lemma;
  std::string upos;
};

using Rng = std::mt19937_64;

size_t pick(Rng& rng, size_t n) { return rng() % n; }

template <typename T>
const T& choose(Rng& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

const std::vector<std::string> kDecl1 = {"terr", "caus", "uit",  "copi",
                                         "grati", "puell", "silu"};
const std::vector<std::string> kDecl1End = {"a", "ae", "am", "arum", "is"};

const std::vector<std::string> kDecl2 = {"loc", "ann", "camp", "mur", "hort", "ocul"};
const std::vector<std::string> kDecl2End = {"us", "i", "o", "um", "os", "orum"};

const std::vector<std::string> kDecl2n = {"bell", "don", "regn", "templ"};
const std::vector<std::string> kDecl2nEnd = {"um", "i", "o", "a", "orum"};

const std::vector<std::string> kDecl3 = {"leg", "reg", "nat", "orat"};
const std::vector<std::string> kDecl3End = {"io", "ionis", "ionem", "ione",
                                            "iones", "ionum", "ionibus"};

const std::vector<std::string> kConj1 = {"am", "laud", "uoc", "port", "pugn", "narr"};
const std::vector<std::string> kConj1End = {"o", "at", "amus", "ant",
                                            "are", "abat", "auit"};

const std::vector<std::string> kConj2 = {"mon", "hab", "ten", "uid"};
const std::vector<std::string> kConj2End = {"eo", "et", "emus", "ent",
                                            "ere", "ebat", "uit"};

const std::vector<std::string> kAdj = {"bon", "magn", "paru", "long", "alt"};
const std::vector<std::string> kAdjEnd = {"us", "a", "um", "i", "ae", "os"};

// homograph stems: stem+"as" reads as a noun (lemma stem+"a") after a
// preposition and as a verb (lemma stem+"o") after "non"
const std::vector<std::string> kAmbig = {"port", "pugn", "form"};

struct Propn {
  std::string lemma;
  std::vector<std::string> forms;
};
const std::vector<Propn> kPropn = {
    {"Caesar", {"Caesar", "Caesaris", "Caesarem", "Caesare"}},
    {"Marcus", {"Marcus", "Marci", "Marcum", "Marco"}},
    {"Iulia", {"Iulia", "Iuliae", "Iuliam"}},
    {"Roma", {"Roma", "Romae", "Romam"}},
    {"Gallia", {"Gallia", "Galliae", "Galliam"}},
};

// absolute-rule pronouns: no character shared with the lemma
const std::vector<std::string> kPronIs = {"eum", "eo", "ea", "eorum", "eam"};
const std::vector<std::string> kPronHic = {"haec", "hoc"};

const std::vector<std::string> kAdp = {"in", "ad", "cum", "de", "ex", "ab"};
const std::vector<std::string> kSconj = {"dum", "ut", "si", "quia"};
const std::vector<std::string> kCconj = {"et", "sed", "atque"};
const std::vector<std::string> kAdv = {"non", "iam", "semper", "bene"};

Word noun(Rng& rng, int style) {
  switch ((pick(rng, 4) + style) % 4) {
    case 0: {
      const std::string& stem = choose(rng, kDecl1);
      return {stem + choose(rng, kDecl1End), stem + "a", "NOUN"};
    }
    case 1: {
      const std::string& stem = choose(rng, kDecl2);
      return {stem + choose(rng, kDecl2End), stem + "us", "NOUN"};
    }
    case 2: {
      const std::string& stem = choose(rng, kDecl2n);
      return {stem + choose(rng, kDecl2nEnd), stem + "um", "NOUN"};
    }
    default: {
      const std::string& stem = choose(rng, kDecl3);
      return {stem + choose(rng, kDecl3End), stem + "io", "NOUN"};
    }
  }
}

Word verb(Rng& rng, int style) {
  if ((pick(rng, 2) + style) % 2 == 0) {
    const std::string& stem = choose(rng, kConj1);
    return {stem + choose(rng, kConj1End), stem + "o", "VERB"};
  }
  const std::string& stem = choose(rng, kConj2);
  return {stem + choose(rng, kConj2End), stem + "eo", "VERB"};
}

Word adjective(Rng& rng) {
  const std::string& stem = choose(rng, kAdj);
  return {stem + choose(rng, kAdjEnd), stem + "us", "ADJ"};
}

Word proper_noun(Rng& rng, bool secondary) {
  const Propn& p = choose(rng, kPropn);
  Word w{choose(rng, p.forms), p.lemma, "PROPN"};
  if (secondary) {
    // diverging treebank convention: common-noun tag, lowercased lemma
    w.upos = "NOUN";
    w.lemma = lemma_engine::unicode::lowercase(w.lemma);
  }
  return w;
}

Word pronoun(Rng& rng) {
  if (pick(rng, 3) == 0) return {choose(rng, kPronHic), "hic", "PRON"};
  return {choose(rng, kPronIs), "is", "PRON"};
}

Word ambig_noun(Rng& rng) {
  const std::string& stem = choose(rng, kAmbig);
  return {stem + "as", stem + "a", "NOUN"};
}

Word ambig_verb(Rng& rng) {
  const std::string& stem = choose(rng, kAmbig);
  return {stem + "as", stem + "o", "VERB"};
}

Word closed(Rng& rng, const std::vector<std::string>& pool, const char* upos) {
  const std::string& w = choose(rng, pool);
  return {w, w, upos};
}

std::vector<Word> make_sentence(Rng& rng, const Profile& profile) {
  std::vector<Word> words;
  int style = profile.style;
  switch ((pick(rng, 8) + style) % 8) {
    case 0:
      words = {closed(rng, kSconj, "SCONJ"), noun(rng, style), verb(rng, style)};
      break;
    case 1:
      words = {proper_noun(rng, profile.secondary), closed(rng, kAdv, "ADV"),
               verb(rng, style)};
      break;
    case 2:
      words = {noun(rng, style), adjective(rng), verb(rng, style), noun(rng, style)};
      break;
    case 3:
      words = {pronoun(rng), verb(rng, style), closed(rng, kCconj, "CCONJ"),
               noun(rng, style)};
      break;
    case 4:
      // homograph in noun reading, always preceded by a preposition
      words = {closed(rng, kAdp, "ADP"), ambig_noun(rng), verb(rng, style)};
      break;
    case 5:
      // homograph in verb reading, always preceded by "non"
      words = {{"non", "non", "ADV"}, ambig_verb(rng), noun(rng, style)};
      break;
    case 6:
      words = {noun(rng, style), verb(rng, style), closed(rng, kAdp, "ADP"),
               proper_noun(rng, profile.secondary)};
      break;
    default:
      words = {proper_noun(rng, profile.secondary), noun(rng, style),
               verb(rng, style), pronoun(rng)};
      break;
  }
  if (pick(rng, 10) == 0)
    words.push_back(closed(rng, kCconj, "CCONJ"));
  words.push_back({pick(rng, 8) == 0 ? "," : ".", pick(rng, 8) == 0 ? "," : ".",
                   "PUNCT"});

  // occasionally capitalize a sentence-initial common word; the lemma stays
  // lowercase, exercising the casing machinery
  if (pick(rng, 5) == 0 && words[0].upos != "PROPN" && words[0].upos != "PUNCT") {
    std::vector<char32_t> chars = lemma_engine::unicode::decode(words[0].form);
    chars[0] = lemma_engine::unicode::to_upper(chars[0]);
    words[0].form = lemma_engine::unicode::encode(chars);
  }
  return words;
}

}  // namespace

Document generate_corpus(const Profile& profile) {
  Rng rng(profile.seed);
  Document doc;
  for (size_t n = 0; n < profile.sentences; n++) {
    Sentence sentence;
    sentence.comments.push_back("# sent_id = " + profile.name + "-" +
                                std::to_string(n + 1));
    std::vector<Word> words = make_sentence(rng, profile);
    for (size_t i = 0; i < words.size(); i++) {
      Token token;
      token.id = std::to_string(i + 1);
      token.form = words[i].form;
      token.lemma = words[i].lemma;
      token.upos = words[i].upos;
      for (int c = 0; c < 6; c++) token.cols5to10[c] = "_";
      sentence.tokens.push_back(std::move(token));
    }
    doc.sentences.push_back(std::move(sentence));
  }
  return doc;
}

std::vector<Profile> default_profiles() {
  return {
      {"aulus", "Aulus", false, 0, 260, 11},
      {"balbus", "Balbus", false, 1, 260, 22},
      {"cato", "Cato", false, 2, 260, 33},
      {"treebank-x", "", true, 3, 160, 44},
      {"treebank-y", "", true, 4, 160, 55},
  };
}

Layout write_fixture(const std::string& dir, const std::vector<Profile>& profiles,
                     const std::string& granularity) {
  fs::create_directories(dir);
  Layout layout;
  layout.dir = dir;

  std::string config = "{\n  \"granularity\": \"" + granularity + "\",\n"
                       "  \"corpora\": [\n";
  for (size_t i = 0; i < profiles.size(); i++) {
    const Profile& p = profiles[i];
    std::string path = (fs::path(dir) / (p.name + ".conllu")).string();
    lemma_engine::write_file(generate_corpus(p), path);
    layout.corpus_paths.push_back(path);

    config += "    {\"name\": \"" + p.name + "\", \"path\": \"" + p.name +
              ".conllu\", \"group\": \"" +
              (p.secondary ? "secondary" : "primary") + "\"";
    if (!p.author.empty()) config += ", \"author\": \"" + p.author + "\"";
    config += "}";
    if (i + 1 < profiles.size()) config += ",";
    config += "\n";
  }
  config += "  ]\n}\n";

  layout.config_path = (fs::path(dir) / "corpus_config.json").string();
  std::ofstream out(layout.config_path, std::ios::binary);
  out << config;
  return layout;
}

}  // namespace fixture
