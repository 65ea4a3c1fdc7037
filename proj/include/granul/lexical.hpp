#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "granul/bytes.hpp"
#include "granul/corpus.hpp"
#include "granul/tokenizer.hpp"

namespace granul {

inline constexpr std::size_t kByteVocabSize = 384;
inline constexpr std::size_t kReservedByteIds = 384 - 5 - 256;

// ByT5-style byte tokenizer: 5 specials, 256 byte tokens (id = 5 + byte
// value), and reserved placeholder ids padding the vocabulary to 384. The
// placeholders are never emitted.
class ByteTokenizer : public Tokenizer {
 public:
  explicit ByteTokenizer(NormalizationConfig norm = {}) : Tokenizer(norm) {
    for (unsigned b = 0; b < 256; ++b)
      vocab_.add(byte_token(static_cast<std::uint8_t>(b)));
    for (std::size_t i = 0; i < kReservedByteIds; ++i)
      vocab_.add("[UNUSED" + std::to_string(i) + "]");
  }

  const Vocabulary& vocab() const override { return vocab_; }
  std::string method() const override { return "char"; }

  static int byte_id(std::uint8_t value) { return 5 + value; }
  static bool is_reserved_id(int id) {
    return id >= 5 + 256 && id < static_cast<int>(kByteVocabSize);
  }

  std::vector<std::string> encode_word(const std::string& word) const override {
    std::vector<std::string> out;
    out.reserve(word.size());
    for (unsigned char b : word) out.push_back(byte_token(b));
    return out;
  }

  // Encodes raw text byte for byte, spaces included, so decode recovers
  // the normalized text exactly.
  Encoding encode_bytes(std::string_view text) const {
    std::string normalized = normalize(text, norm_);
    Encoding enc;
    enc.ids.reserve(normalized.size());
    enc.tokens.reserve(normalized.size());
    for (unsigned char b : normalized) {
      enc.ids.push_back(byte_id(b));
      enc.tokens.push_back(byte_token(b));
    }
    if (!enc.ids.empty()) enc.word_spans.emplace_back(0, enc.ids.size());
    return enc;
  }

  std::string decode_bytes(const Encoding& enc) const {
    std::string out;
    out.reserve(enc.ids.size());
    for (int id : enc.ids) {
      if (is_reserved_id(id))
        throw invalid_token_error("reserved placeholder id " +
                                  std::to_string(id));
      if (id < 5 || id >= 5 + 256)
        throw invalid_token_error("not a byte id: " + std::to_string(id));
      out += static_cast<char>(id - 5);
    }
    return out;
  }

 private:
  Vocabulary vocab_;
};

// Surface word -> ordered morphological units. The first unit is the bare
// stem; continuations carry the "##" prefix. Units must rebuild the word.
class SegmentationLexicon {
 public:
  void add(const std::string& surface, std::vector<std::string> units) {
    validate(surface, units);
    if (!entries_.emplace(surface, std::move(units)).second)
      throw format_error("duplicate surface form: \"" + surface + "\"");
  }

  // Units for a word; words the lexicon does not know are a single unit.
  std::vector<std::string> segment(const std::string& word) const {
    auto it = entries_.find(word);
    if (it != entries_.end()) return it->second;
    return {word};
  }

  bool contains(const std::string& word) const {
    return entries_.count(word) != 0;
  }
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, std::vector<std::string>>& entries()
      const {
    return entries_;
  }

  static void validate(const std::string& surface,
                       const std::vector<std::string>& units) {
    if (units.empty())
      throw format_error("no units for \"" + surface + "\"");
    std::string rebuilt;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const std::string& unit = units[i];
      if (unit.empty() || (i > 0 && unit == kContinuationPrefix))
        throw format_error("empty unit for \"" + surface + "\"");
      if (i == 0) {
        if (unit.compare(0, 2, kContinuationPrefix) == 0)
          throw format_error("stem must not carry the continuation prefix: \"" +
                             surface + "\"");
        rebuilt += unit;
      } else {
        if (unit.compare(0, 2, kContinuationPrefix) != 0)
          throw format_error("suffix unit missing continuation prefix: \"" +
                             surface + "\"");
        rebuilt += unit.substr(2);
      }
    }
    if (rebuilt != surface)
      throw format_error("units concatenate to \"" + rebuilt +
                         "\", not \"" + surface + "\"");
  }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

// Lexicon file: TSV "surface<TAB>unit unit ...", '#' comment lines.
inline SegmentationLexicon lexicon_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot read " + path);
  SegmentationLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw format_error("expected \"surface<TAB>units\"", line_no);
    std::string surface = line.substr(0, tab);
    std::vector<std::string> units;
    std::istringstream rest(line.substr(tab + 1));
    std::string unit;
    while (rest >> unit) units.push_back(unit);
    try {
      lexicon.add(surface, std::move(units));
    } catch (const format_error& e) {
      throw format_error(e.what(), line_no);
    }
  }
  return lexicon;
}

inline void lexicon_save(const SegmentationLexicon& lexicon,
                         const std::string& path) {
  std::vector<std::string> surfaces;
  for (const auto& [surface, units] : lexicon.entries())
    surfaces.push_back(surface);
  std::sort(surfaces.begin(), surfaces.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path);
  for (const auto& surface : surfaces) {
    out << surface << '\t';
    const auto& units = lexicon.entries().at(surface);
    for (std::size_t i = 0; i < units.size(); ++i)
      out << (i ? " " : "") << units[i];
    out << '\n';
  }
}

enum class LexicalMethod { word, morph };

class LexicalTokenizer : public Tokenizer {
 public:
  LexicalTokenizer(LexicalMethod method, Vocabulary vocab,
                   SegmentationLexicon lexicon = {},
                   NormalizationConfig norm = {})
      : Tokenizer(norm),
        method_(method),
        vocab_(std::move(vocab)),
        lexicon_(std::move(lexicon)) {}

  const Vocabulary& vocab() const override { return vocab_; }
  std::string method() const override {
    return method_ == LexicalMethod::word ? "word" : "morph";
  }
  LexicalMethod lexical_method() const { return method_; }
  const SegmentationLexicon& lexicon() const { return lexicon_; }

  std::vector<std::string> encode_word(const std::string& word) const override {
    if (method_ == LexicalMethod::word) {
      if (vocab_.contains(word)) return {word};
      return {std::string(SpecialTokens::unk)};
    }
    std::vector<std::string> out;
    for (const auto& unit : lexicon_.segment(word))
      out.push_back(vocab_.contains(unit) ? unit
                                          : std::string(SpecialTokens::unk));
    return out;
  }

 private:
  LexicalMethod method_;
  Vocabulary vocab_;
  SegmentationLexicon lexicon_;
};

namespace detail {

// Top (vocab_size - 5) entries by count, lexicographic tie-break.
inline Vocabulary rank_into_vocabulary(
    const std::unordered_map<std::string, std::uint64_t>& counts,
    std::size_t vocab_size) {
  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(),
                                                            counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (const auto& [text, count] : ranked) {
    if (vocab.size() >= vocab_size) break;
    vocab.add(text);
  }
  return vocab;
}

}  // namespace detail

inline LexicalTokenizer train_wordlevel(const WordCounts& counts,
                                        std::size_t vocab_size,
                                        NormalizationConfig norm = {}) {
  if (vocab_size < 5)
    throw invalid_argument_error("word vocab_size must be at least 5");
  return LexicalTokenizer(LexicalMethod::word,
                          detail::rank_into_vocabulary(counts.counts,
                                                       vocab_size),
                          {}, norm);
}

// Segments every counted word through the lexicon, accumulates unit
// frequencies weighted by word counts, and keeps the most frequent units.
inline LexicalTokenizer train_morph(const WordCounts& counts,
                                    SegmentationLexicon lexicon,
                                    std::size_t vocab_size,
                                    NormalizationConfig norm = {}) {
  if (vocab_size < 5)
    throw invalid_argument_error("morph vocab_size must be at least 5");
  std::unordered_map<std::string, std::uint64_t> unit_counts;
  for (const auto& [word, freq] : counts.counts)
    for (const auto& unit : lexicon.segment(word)) unit_counts[unit] += freq;
  return LexicalTokenizer(LexicalMethod::morph,
                          detail::rank_into_vocabulary(unit_counts, vocab_size),
                          std::move(lexicon), norm);
}

}  // namespace granul
