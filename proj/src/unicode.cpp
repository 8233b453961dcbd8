#include "lemma_engine/unicode.hpp"

#include <algorithm>

namespace lemma_engine {
namespace unicode {

namespace {

struct CasePair {
  char32_t from;
  char32_t to;
};

#include "case_table.inc"

char32_t lookup(const CasePair* table, size_t size, char32_t c) {
  auto end = table + size;
  auto it = std::lower_bound(table, end, c, [](const CasePair& p, char32_t key) {
    return p.from < key;
  });
  if (it != end && it->from == c) return it->to;
  return c;
}

}  // namespace

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      i += 1;
      continue;
    }
    int len;
    char32_t c;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      c = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      c = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      c = b0 & 0x07;
    } else {
      throw Utf8Error("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > text.size())
      throw Utf8Error("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (int k = 1; k < len; k++) {
      unsigned char b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80)
        throw Utf8Error("invalid UTF-8 continuation byte at offset " +
                        std::to_string(i + k));
      c = (c << 6) | (b & 0x3F);
    }
    static const char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (c < kMinForLen[len])
      throw Utf8Error("overlong UTF-8 encoding at offset " + std::to_string(i));
    if (c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF))
      throw Utf8Error("invalid scalar value at offset " + std::to_string(i));
    out.push_back(c);
    i += len;
  }
  return out;
}

bool valid(std::string_view text) {
  try {
    decode(text);
    return true;
  } catch (const Utf8Error&) {
    return false;
  }
}

void append(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

std::string encode(const std::vector<char32_t>& chars) {
  std::string out;
  out.reserve(chars.size());
  for (char32_t c : chars) append(out, c);
  return out;
}

char32_t to_lower(char32_t c) {
  return lookup(kToLower, std::size(kToLower), c);
}

char32_t to_upper(char32_t c) {
  return lookup(kToUpper, std::size(kToUpper), c);
}

std::vector<char32_t> to_lower(const std::vector<char32_t>& chars) {
  std::vector<char32_t> out(chars.size());
  std::transform(chars.begin(), chars.end(), out.begin(),
                 [](char32_t c) { return to_lower(c); });
  return out;
}

std::string lowercase(std::string_view text) {
  return encode(to_lower(decode(text)));
}

}  // namespace unicode
}  // namespace lemma_engine
