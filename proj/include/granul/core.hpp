#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utf8.h>

#include "granul/errors.hpp"

namespace granul {

inline constexpr std::string_view kContinuationPrefix = "##";

// The five reserved tokens. Ids are fixed so serialized models stay
// portable across tools.
struct SpecialTokens {
  static constexpr std::string_view pad = "[PAD]";
  static constexpr std::string_view unk = "[UNK]";
  static constexpr std::string_view cls = "[CLS]";
  static constexpr std::string_view sep = "[SEP]";
  static constexpr std::string_view mask = "[MASK]";

  static constexpr int pad_id = 0;
  static constexpr int unk_id = 1;
  static constexpr int cls_id = 2;
  static constexpr int sep_id = 3;
  static constexpr int mask_id = 4;

  static const std::vector<std::string>& all() {
    static const std::vector<std::string> v = {
        std::string(pad), std::string(unk), std::string(cls),
        std::string(sep), std::string(mask)};
    return v;
  }
};

inline bool is_special_token(std::string_view text) {
  const auto& s = SpecialTokens::all();
  return std::find(s.begin(), s.end(), text) != s.end();
}

// Token text validity: non-empty, no whitespace bytes.
inline bool valid_token_text(std::string_view text) {
  if (text.empty()) return false;
  for (unsigned char c : text)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f')
      return false;
  return true;
}

// Bijective token<->id table. Ids are contiguous, specials occupy 0..4.
class Vocabulary {
 public:
  Vocabulary() {
    for (const auto& s : SpecialTokens::all()) add(s);
  }

  // Appends a token; returns its id. Duplicate or malformed text throws.
  int add(std::string text) {
    if (!valid_token_text(text))
      throw format_error("invalid token text: \"" + text + "\"");
    auto [it, inserted] =
        index_.emplace(text, static_cast<int>(entries_.size()));
    if (!inserted)
      throw format_error("duplicate token: \"" + text + "\"");
    entries_.push_back(std::move(text));
    return it->second;
  }

  bool contains(std::string_view text) const {
    return index_.find(std::string(text)) != index_.end();
  }

  // -1 when absent.
  int id_of(std::string_view text) const {
    auto it = index_.find(std::string(text));
    return it == index_.end() ? -1 : it->second;
  }

  const std::string& token_of(int id) const {
    if (id < 0 || id >= static_cast<int>(entries_.size()))
      throw invalid_token_error("id out of range: " + std::to_string(id));
    return entries_[static_cast<std::size_t>(id)];
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& entries() const { return entries_; }

  bool operator==(const Vocabulary& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, int> index_;
};

// NFC and Turkish casing are fixed; only lowercasing itself is optional.
struct NormalizationConfig {
  bool lowercase = true;
};

namespace detail {

// Returns the byte offset of the first invalid UTF-8 byte, or nullopt.
inline std::optional<std::size_t> find_invalid_utf8(std::string_view text) {
  std::size_t i = 0;
  const auto n = static_cast<std::int32_t>(text.size());
  const char* s = text.data();
  while (i < text.size()) {
    std::int32_t pos = static_cast<std::int32_t>(i);
    UChar32 cp;
    U8_NEXT(s, pos, n, cp);
    if (cp < 0) return i;
    i = static_cast<std::size_t>(pos);
  }
  return std::nullopt;
}

inline std::u16string to_utf16(std::string_view text) {
  std::u16string out(text.size() + 1, u'\0');
  UErrorCode status = U_ZERO_ERROR;
  std::int32_t len = 0;
  u_strFromUTF8(out.data(), static_cast<std::int32_t>(out.size()), &len,
                text.data(), static_cast<std::int32_t>(text.size()), &status);
  if (U_FAILURE(status))
    throw error(std::string("utf-16 conversion failed: ") +
                u_errorName(status));
  out.resize(static_cast<std::size_t>(len));
  return out;
}

inline std::string to_utf8(const std::u16string& text) {
  std::string out(text.size() * 4 + 1, '\0');
  UErrorCode status = U_ZERO_ERROR;
  std::int32_t len = 0;
  u_strToUTF8(out.data(), static_cast<std::int32_t>(out.size()), &len,
              text.data(), static_cast<std::int32_t>(text.size()), &status);
  if (U_FAILURE(status))
    throw error(std::string("utf-8 conversion failed: ") +
                u_errorName(status));
  out.resize(static_cast<std::size_t>(len));
  return out;
}

inline const UNormalizer2* nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const UNormalizer2* n = unorm2_getNFCInstance(&status);
  if (U_FAILURE(status))
    throw error(std::string("NFC normalizer unavailable: ") +
                u_errorName(status));
  return n;
}

}  // namespace detail

// Lowercases with Turkish casing rules (I -> ı, İ -> i) when enabled, then
// composes to NFC. Idempotent.
inline std::string normalize(std::string_view text,
                             const NormalizationConfig& config = {}) {
  if (auto offset = detail::find_invalid_utf8(text))
    throw malformed_input_error("invalid UTF-8", *offset);
  std::u16string u16 = detail::to_utf16(text);

  if (config.lowercase) {
    std::u16string lowered(u16.size() * 2 + 8, u'\0');
    UErrorCode status = U_ZERO_ERROR;
    std::int32_t len = u_strToLower(
        lowered.data(), static_cast<std::int32_t>(lowered.size()), u16.data(),
        static_cast<std::int32_t>(u16.size()), "tr", &status);
    if (U_FAILURE(status))
      throw error(std::string("lowercasing failed: ") + u_errorName(status));
    lowered.resize(static_cast<std::size_t>(len));
    u16 = std::move(lowered);
  }

  const UNormalizer2* nfc = detail::nfc();
  std::u16string composed(u16.size() * 2 + 8, u'\0');
  UErrorCode status = U_ZERO_ERROR;
  std::int32_t len = unorm2_normalize(
      nfc, u16.data(), static_cast<std::int32_t>(u16.size()), composed.data(),
      static_cast<std::int32_t>(composed.size()), &status);
  if (U_FAILURE(status))
    throw error(std::string("NFC normalization failed: ") +
                u_errorName(status));
  composed.resize(static_cast<std::size_t>(len));
  return detail::to_utf8(composed);
}

inline bool is_nfc(std::string_view text) {
  std::u16string u16 = detail::to_utf16(text);
  UErrorCode status = U_ZERO_ERROR;
  UBool r = unorm2_isNormalized(detail::nfc(), u16.data(),
                                static_cast<std::int32_t>(u16.size()),
                                &status);
  return U_SUCCESS(status) && r;
}

// Splits normalized text into words: whitespace separates, and each
// maximal run of punctuation becomes a word of its own.
inline std::vector<std::string> pre_tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  bool current_is_punct = false;

  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  };

  const char* s = text.data();
  const auto n = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < n) {
    std::int32_t start = i;
    UChar32 cp;
    U8_NEXT(s, i, n, cp);
    if (cp < 0)
      throw malformed_input_error("invalid UTF-8",
                                  static_cast<std::size_t>(start));
    if (u_isUWhiteSpace(cp)) {
      flush();
      continue;
    }
    bool is_punct = u_ispunct(cp);
    if (!current.empty() && is_punct != current_is_punct) flush();
    current_is_punct = is_punct;
    current.append(s + start, static_cast<std::size_t>(i - start));
  }
  flush();
  return words;
}

// Splits a UTF-8 word into code-point chunks.
inline std::vector<std::string> utf8_chars(const std::string& word) {
  std::vector<std::string> chars;
  const char* s = word.data();
  const auto n = static_cast<std::int32_t>(word.size());
  std::int32_t i = 0;
  while (i < n) {
    std::int32_t start = i;
    UChar32 cp;
    U8_NEXT(s, i, n, cp);
    if (cp < 0)
      throw malformed_input_error("invalid UTF-8",
                                  static_cast<std::size_t>(start));
    chars.emplace_back(s + start, static_cast<std::size_t>(i - start));
  }
  return chars;
}

// Token ids plus display texts, with per-word token ranges.
struct Encoding {
  std::vector<int> ids;
  std::vector<std::string> tokens;
  // Half-open [begin, end) token ranges, one per input word.
  std::vector<std::pair<std::size_t, std::size_t>> word_spans;
};

// Wraps a body in [CLS] ... [SEP], truncating the body to max_length - 2.
inline Encoding assemble_sequence(const Encoding& body, const Vocabulary& vocab,
                                  std::size_t max_length) {
  if (max_length < 2)
    throw invalid_argument_error("max_length must be at least 2");
  const std::size_t kept = std::min(body.tokens.size(), max_length - 2);

  Encoding out;
  out.ids.push_back(SpecialTokens::cls_id);
  out.tokens.emplace_back(SpecialTokens::cls);
  out.ids.insert(out.ids.end(), body.ids.begin(),
                 body.ids.begin() + static_cast<std::ptrdiff_t>(kept));
  out.tokens.insert(out.tokens.end(), body.tokens.begin(),
                    body.tokens.begin() + static_cast<std::ptrdiff_t>(kept));
  out.ids.push_back(SpecialTokens::sep_id);
  out.tokens.emplace_back(SpecialTokens::sep);

  for (auto [begin, end] : body.word_spans) {
    std::size_t b = std::min(begin, kept);
    std::size_t e = std::min(end, kept);
    if (e > b) out.word_spans.emplace_back(b + 1, e + 1);
  }
  (void)vocab;
  return out;
}

// Vocab file: one token per line, LF, no BOM, first five lines the specials.
inline void vocab_save(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path);
  for (const auto& token : vocab.entries()) out << token << '\n';
}

inline Vocabulary vocab_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot read " + path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw format_error("empty line in vocab file", line_no);
    if (line_no <= 5) {
      if (line != SpecialTokens::all()[line_no - 1])
        throw format_error("missing special token: expected \"" +
                               SpecialTokens::all()[line_no - 1] + "\"",
                           line_no);
      continue;
    }
    try {
      vocab.add(line);
    } catch (const format_error& e) {
      throw format_error(e.what(), line_no);
    }
  }
  if (line_no < 5) throw format_error("missing special token", line_no);
  return vocab;
}

}  // namespace granul
