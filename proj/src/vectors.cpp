#include "lemma_engine/vectors.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lemma_engine/conllu.hpp"

namespace lemma_engine {

ExternalVectors parse_vectors(const std::string& text, const std::string& name) {
  ExternalVectors out;
  std::istringstream in(text);
  std::string line;

  if (!std::getline(in, line) || line.empty())
    throw VectorsError(name + ": missing width declaration on line 1");
  {
    int width = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), width);
    if (ec != std::errc{} || ptr != line.data() + line.size() || width <= 0)
      throw VectorsError(name + ": line 1 must declare a positive integer width");
    out.width = static_cast<uint32_t>(width);
  }

  std::vector<std::vector<float>> sentence;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    line_no++;
    if (line.empty()) {
      if (!sentence.empty()) out.sentences.push_back(std::move(sentence));
      sentence.clear();
      continue;
    }
    std::vector<float> values;
    values.reserve(out.width);
    size_t start = 0;
    while (start <= line.size()) {
      size_t tab = line.find('\t', start);
      std::string field = line.substr(
          start, (tab == std::string::npos ? line.size() : tab) - start);
      char* end = nullptr;
      float v = std::strtof(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size())
        throw VectorsError(name + ": line " + std::to_string(line_no) +
                           ": bad number '" + field + "'");
      values.push_back(v);
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (values.size() != out.width)
      throw VectorsError(name + ": line " + std::to_string(line_no) + ": expected " +
                         std::to_string(out.width) + " values, got " +
                         std::to_string(values.size()));
    sentence.push_back(std::move(values));
  }
  if (!sentence.empty()) out.sentences.push_back(std::move(sentence));
  return out;
}

ExternalVectors load_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VectorsError("cannot open vector file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_vectors(buf.str(), path);
}

void check_alignment(const ExternalVectors& vectors, const Document& doc,
                     const std::string& name) {
  if (vectors.sentences.size() != doc.sentences.size())
    throw VectorsError(name + ": has " + std::to_string(vectors.sentences.size()) +
                       " sentences but the document has " +
                       std::to_string(doc.sentences.size()));
  for (size_t i = 0; i < doc.sentences.size(); i++) {
    if (vectors.sentences[i].size() != doc.sentences[i].tokens.size())
      throw VectorsError(name + ": sentence " + std::to_string(i + 1) + " has " +
                         std::to_string(vectors.sentences[i].size()) +
                         " vectors but " +
                         std::to_string(doc.sentences[i].tokens.size()) + " tokens");
  }
}

}  // namespace lemma_engine
