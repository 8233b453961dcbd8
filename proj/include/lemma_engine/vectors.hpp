#pragma once

// Sidecar files of externally computed per-token vectors. Format: line 1
// declares the width, then one TAB-separated line of reals per token line of
// the matching CoNLL-U file, with a blank line at every sentence boundary.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lemma_engine {

struct Document;

struct VectorsError : std::runtime_error {
  explicit VectorsError(const std::string& what) : std::runtime_error(what) {}
};

struct ExternalVectors {
  uint32_t width = 0;
  std::vector<std::vector<std::vector<float>>> sentences;  // [sentence][token][width]
};

ExternalVectors load_vectors(const std::string& path);
ExternalVectors parse_vectors(const std::string& text, const std::string& name);

// Checks sentence and token counts against a document; throws VectorsError.
void check_alignment(const ExternalVectors& vectors, const Document& doc,
                     const std::string& name);

}  // namespace lemma_engine
