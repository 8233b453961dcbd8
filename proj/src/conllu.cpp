#include "lemma_engine/conllu.hpp"

#include <fstream>
#include <sstream>

#include "lemma_engine/unicode.hpp"

namespace lemma_engine {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty() || s.size() > 9) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

}  // namespace

TokenIdKind Token::id_kind() const {
  if (id.find('-') != std::string::npos) return TokenIdKind::Range;
  if (id.find('.') != std::string::npos) return TokenIdKind::EmptyNode;
  return TokenIdKind::Regular;
}

Document parse_document(const std::string& text) {
  if (!unicode::valid(text)) {
    // locate the first offending line for the error message
    size_t line_no = 1, start = 0;
    while (start <= text.size()) {
      size_t end = text.find('\n', start);
      std::string_view line(text.data() + start,
                            (end == std::string::npos ? text.size() : end) - start);
      if (!unicode::valid(line)) throw ParseError(line_no, "invalid UTF-8");
      if (end == std::string::npos) break;
      start = end + 1;
      line_no++;
    }
    throw ParseError(line_no, "invalid UTF-8");
  }

  Document doc;
  Sentence current;
  long expected_id = 1;
  bool in_sentence = false;

  auto flush = [&](size_t line_no) {
    if (!in_sentence) return;
    if (current.tokens.empty())
      throw ParseError(line_no, "sentence with comments but no token lines");
    doc.sentences.push_back(std::move(current));
    current = Sentence();
    expected_id = 1;
    in_sentence = false;
  };

  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    std::string line = end == std::string::npos ? text.substr(start)
                                                : text.substr(start, end - start);
    start = end == std::string::npos ? text.size() : end + 1;
    line_no++;

    if (line.empty()) {
      flush(line_no);
      continue;
    }
    if (line[0] == '#') {
      if (!current.tokens.empty())
        throw ParseError(line_no, "comment after token lines");
      current.comments.push_back(line);
      in_sentence = true;
      continue;
    }

    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 10)
      throw ParseError(line_no, "expected 10 tab-separated columns, got " +
                                    std::to_string(cols.size()));
    for (const std::string& c : cols)
      if (c.empty()) throw ParseError(line_no, "empty column");

    Token token;
    token.id = cols[0];
    token.form = cols[1];
    if (cols[2] != "_") token.lemma = cols[2];
    if (cols[3] != "_") token.upos = cols[3];
    for (int i = 0; i < 6; i++) token.cols5to10[i] = cols[4 + i];

    switch (token.id_kind()) {
      case TokenIdKind::Regular: {
        if (!all_digits(token.id))
          throw ParseError(line_no, "malformed token id '" + token.id + "'");
        long id = std::stol(token.id);
        if (id != expected_id)
          throw ParseError(line_no, "non-consecutive token id " + token.id +
                                        " (expected " +
                                        std::to_string(expected_id) + ")");
        expected_id++;
        break;
      }
      case TokenIdKind::Range: {
        size_t dash = token.id.find('-');
        std::string a = token.id.substr(0, dash), b = token.id.substr(dash + 1);
        if (!all_digits(a) || !all_digits(b))
          throw ParseError(line_no, "malformed range id '" + token.id + "'");
        if (std::stol(a) != expected_id || std::stol(b) < std::stol(a))
          throw ParseError(line_no, "range id " + token.id +
                                        " does not start at the next token id");
        break;
      }
      case TokenIdKind::EmptyNode: {
        size_t dot = token.id.find('.');
        std::string a = token.id.substr(0, dot), b = token.id.substr(dot + 1);
        bool ok = (a == "0" || all_digits(a)) && all_digits(b);
        if (ok && a != "0") ok = std::stol(a) == expected_id - 1;
        if (!ok)
          throw ParseError(line_no, "malformed empty-node id '" + token.id + "'");
        break;
      }
    }

    current.tokens.push_back(std::move(token));
    in_sentence = true;
  }
  flush(line_no + 1);
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

std::string serialize_document(const Document& doc) {
  std::string out;
  for (const Sentence& sentence : doc.sentences) {
    for (const std::string& comment : sentence.comments) {
      out += comment;
      out += '\n';
    }
    for (const Token& token : sentence.tokens) {
      out += token.id;
      out += '\t';
      out += token.form;
      out += '\t';
      out += token.lemma ? *token.lemma : "_";
      out += '\t';
      out += token.upos ? *token.upos : "_";
      for (int i = 0; i < 6; i++) {
        out += '\t';
        out += token.cols5to10[i];
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void write_file(const Document& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << serialize_document(doc);
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool operator==(const Token& a, const Token& b) {
  if (a.id != b.id || a.form != b.form || a.lemma != b.lemma || a.upos != b.upos)
    return false;
  for (int i = 0; i < 6; i++)
    if (a.cols5to10[i] != b.cols5to10[i]) return false;
  return true;
}

bool operator==(const Sentence& a, const Sentence& b) {
  return a.comments == b.comments && a.tokens == b.tokens;
}

bool operator==(const Document& a, const Document& b) {
  return a.sentences == b.sentences;
}

}  // namespace lemma_engine
