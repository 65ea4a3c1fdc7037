#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "granul/errors.hpp"

namespace granul {

// Byte symbols are raw byte strings internally. For vocab and merges
// files (one token per line, no whitespace) they are rendered as text:
// bytes that form valid, non-whitespace UTF-8 appear as themselves, and
// everything else (controls, whitespace, '<', invalid sequences) becomes
// a "<0xNN>" escape. '<' is always escaped, so rendering is injective.

namespace detail {

inline std::string escape_byte(unsigned char b) {
  static const char* hex = "0123456789ABCDEF";
  std::string out = "<0x";
  out += hex[b >> 4];
  out += hex[b & 0xF];
  out += '>';
  return out;
}

inline bool render_raw(UChar32 cp) {
  if (cp < 0x21 || cp == 0x7F || cp == '<') return false;
  return !u_isUWhiteSpace(cp);
}

}  // namespace detail

inline std::string render_symbol(const std::string& raw) {
  std::string out;
  const char* s = raw.data();
  const auto n = static_cast<std::int32_t>(raw.size());
  std::int32_t i = 0;
  while (i < n) {
    std::int32_t start = i;
    UChar32 cp;
    U8_NEXT(s, i, n, cp);
    if (cp < 0) {
      out += detail::escape_byte(static_cast<unsigned char>(s[start]));
      i = start + 1;
    } else if (detail::render_raw(cp)) {
      out.append(s + start, static_cast<std::size_t>(i - start));
    } else {
      for (std::int32_t j = start; j < i; ++j)
        out += detail::escape_byte(static_cast<unsigned char>(s[j]));
    }
  }
  return out;
}

inline std::string parse_symbol(const std::string& text) {
  std::string out;
  std::size_t i = 0;
  auto hex_value = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  while (i < text.size()) {
    if (text[i] == '<') {
      if (i + 6 > text.size() || text.compare(i, 3, "<0x") != 0 ||
          text[i + 5] != '>' || hex_value(text[i + 3]) < 0 ||
          hex_value(text[i + 4]) < 0)
        throw invalid_token_error("bad byte escape in \"" + text + "\"");
      out += static_cast<char>(hex_value(text[i + 3]) * 16 +
                               hex_value(text[i + 4]));
      i += 6;
    } else {
      out += text[i++];
    }
  }
  return out;
}

// Rendered text for a single byte value.
inline const std::string& byte_token(std::uint8_t value) {
  static const std::array<std::string, 256> table = [] {
    std::array<std::string, 256> t;
    for (unsigned b = 0; b < 256; ++b)
      t[b] = render_symbol(std::string(1, static_cast<char>(b)));
    return t;
  }();
  return table[value];
}

inline std::uint8_t byte_of_token(const std::string& text) {
  static const std::unordered_map<std::string, std::uint8_t> table = [] {
    std::unordered_map<std::string, std::uint8_t> t;
    for (unsigned b = 0; b < 256; ++b)
      t.emplace(byte_token(static_cast<std::uint8_t>(b)),
                static_cast<std::uint8_t>(b));
    return t;
  }();
  auto it = table.find(text);
  if (it == table.end())
    throw invalid_token_error("not a byte token: \"" + text + "\"");
  return it->second;
}

}  // namespace granul
