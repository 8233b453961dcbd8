#pragma once

// UTF-8 and simple (locale-free, unconditional) case mapping over Unicode
// scalar values. Case mapping covers only bijective upper/lower pairs;
// characters outside these pairs are caseless and map to themselves.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lemma_engine {
namespace unicode {

struct Utf8Error : std::runtime_error {
  explicit Utf8Error(const std::string& what) : std::runtime_error(what) {}
};

// Decodes UTF-8 into scalar values; throws Utf8Error on malformed input
// (overlong encodings, surrogates and out-of-range values included).
std::vector<char32_t> decode(std::string_view text);

// True iff text is well-formed UTF-8.
bool valid(std::string_view text);

void append(std::string& out, char32_t c);
std::string encode(const std::vector<char32_t>& chars);

char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);

// Upper iff lowercasing changes the character; everything else is lower.
inline bool is_upper(char32_t c) { return to_lower(c) != c; }
inline bool is_lower_cased(char32_t c) { return to_upper(c) != c; }

std::vector<char32_t> to_lower(const std::vector<char32_t>& chars);
std::string lowercase(std::string_view text);

}  // namespace unicode
}  // namespace lemma_engine
