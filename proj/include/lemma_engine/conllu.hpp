#pragma once

// Lossless CoNLL-U reading and writing. Only FORM, LEMMA and UPOS are
// interpreted; XPOS through MISC and all comments pass through verbatim.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lemma_engine {

struct ParseError : std::runtime_error {
  ParseError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  size_t line;
};

enum class TokenIdKind { Regular, Range, EmptyNode };

struct Token {
  std::string id;  // kept verbatim: "5", "4-5" or "5.1"
  std::string form;
  std::optional<std::string> lemma;  // "_" in the file maps to absent
  std::optional<std::string> upos;
  std::string cols5to10[6];  // XPOS, FEATS, HEAD, DEPREL, DEPS, MISC

  TokenIdKind id_kind() const;
  // True for single-integer ids; only these receive predictions or scores.
  bool is_regular() const { return id_kind() == TokenIdKind::Regular; }
};

struct Sentence {
  std::vector<std::string> comments;  // "#"-lines, verbatim
  std::vector<Token> tokens;
};

struct Document {
  std::vector<Sentence> sentences;
};

// Parses UTF-8 CoNLL-U text. Throws ParseError (with 1-based line number) on
// wrong column counts, blank FORM, empty columns, non-consecutive regular ids
// or invalid UTF-8.
Document parse_document(const std::string& text);

Document parse_file(const std::string& path);

// Canonical serialization: every sentence is followed by exactly one blank
// line; absent lemma/upos render as "_". parse(serialize(d)) == d, and
// serialize(parse(text)) == text for canonical input.
std::string serialize_document(const Document& doc);

void write_file(const Document& doc, const std::string& path);

bool operator==(const Token& a, const Token& b);
bool operator==(const Sentence& a, const Sentence& b);
bool operator==(const Document& a, const Document& b);

}  // namespace lemma_engine
