#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <unicode/utf8.h>

#include "granul/bytes.hpp"
#include "granul/corpus.hpp"
#include "granul/tokenizer.hpp"

namespace granul {

using SymbolPair = std::pair<std::string, std::string>;

struct SymbolPairHash {
  std::size_t operator()(const SymbolPair& p) const {
    std::size_t h1 = std::hash<std::string>()(p.first);
    std::size_t h2 = std::hash<std::string>()(p.second);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

// Learned merges in rank order. Symbols are stored in internal form: raw
// byte strings for BPE, "##"-marked character pieces for WordPiece.
struct MergeTable {
  std::vector<SymbolPair> pairs;

  bool operator==(const MergeTable& other) const {
    return pairs == other.pairs;
  }
};

enum class SubwordMethod { bpe, wordpiece };

inline std::string strip_continuation(const std::string& symbol) {
  if (symbol.size() > 2 && symbol.compare(0, 2, kContinuationPrefix) == 0)
    return symbol.substr(2);
  return symbol;
}

class SubwordTokenizer : public Tokenizer {
 public:
  SubwordTokenizer(SubwordMethod method, Vocabulary vocab, MergeTable merges,
                   std::vector<std::string> base_alphabet,
                   NormalizationConfig norm = {})
      : Tokenizer(norm),
        method_(method),
        vocab_(std::move(vocab)),
        merges_(std::move(merges)),
        base_alphabet_(std::move(base_alphabet)) {
    for (std::size_t rank = 0; rank < merges_.pairs.size(); ++rank)
      merge_rank_.emplace(merges_.pairs[rank], rank);
  }

  const Vocabulary& vocab() const override { return vocab_; }
  std::string method() const override {
    return method_ == SubwordMethod::bpe ? "bpe" : "wordpiece";
  }
  SubwordMethod subword_method() const { return method_; }
  const MergeTable& merges() const { return merges_; }
  const std::vector<std::string>& base_alphabet() const {
    return base_alphabet_;
  }

  std::vector<std::string> encode_word(const std::string& word) const override {
    return method_ == SubwordMethod::bpe ? encode_bpe(word)
                                         : encode_wordpiece(word);
  }

  int token_id(const std::string& token) const override {
    int id = vocab_.id_of(token);
    if (id >= 0) return id;
    if (method_ == SubwordMethod::bpe &&
        token.compare(0, 2, kContinuationPrefix) == 0) {
      id = vocab_.id_of(token.substr(2));
      if (id >= 0) return id;
    }
    throw invalid_token_error("token not in vocabulary: \"" + token + "\"");
  }

  // Inverse of encode for UNK-free streams. Word boundaries are where a
  // token carries no continuation prefix.
  std::string decode(const std::vector<std::string>& tokens) const {
    std::string out;
    std::string word;
    auto flush = [&] {
      if (word.empty()) return;
      if (!out.empty()) out += ' ';
      out += word;
      word.clear();
    };
    for (const auto& token : tokens) {
      if (is_special_token(token))
        throw invalid_token_error("cannot decode special token " + token);
      bool continuation = token.compare(0, 2, kContinuationPrefix) == 0;
      std::string bare = continuation ? token.substr(2) : token;
      if (method_ == SubwordMethod::wordpiece) {
        // WordPiece stores continuation entries verbatim.
        if (vocab_.id_of(token) < 0)
          throw invalid_token_error("token not in vocabulary: \"" + token +
                                    "\"");
      } else if (vocab_.id_of(bare) < 0) {
        // BPE stores bare symbols; a leading "##" that does not strip to
        // a vocabulary entry is taken literally.
        if (continuation && vocab_.id_of(token) >= 0) {
          bare = token;
          continuation = false;
        } else {
          throw invalid_token_error("token not in vocabulary: \"" + token +
                                    "\"");
        }
      }
      if (!continuation) flush();
      word += method_ == SubwordMethod::bpe ? parse_symbol(bare) : bare;
    }
    flush();
    return out;
  }

 private:
  // Symbols are raw byte strings; display rendering happens at the end.
  std::vector<std::string> encode_bpe(const std::string& word) const {
    std::vector<std::string> symbols;
    symbols.reserve(word.size());
    for (char b : word) symbols.emplace_back(1, b);

    // Repeatedly merge the adjacent pair with the lowest rank, leftmost
    // first on equal rank.
    while (symbols.size() > 1) {
      std::size_t best_pos = 0;
      std::size_t best_rank = merges_.pairs.size();
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = merge_rank_.find({symbols[i], symbols[i + 1]});
        if (it != merge_rank_.end() && it->second < best_rank) {
          best_rank = it->second;
          best_pos = i;
        }
      }
      if (best_rank == merges_.pairs.size()) break;
      symbols[best_pos] += symbols[best_pos + 1];
      symbols.erase(symbols.begin() +
                    static_cast<std::ptrdiff_t>(best_pos + 1));
    }

    std::vector<std::string> out;
    out.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
      out.push_back(i == 0 ? render_symbol(symbols[i])
                           : std::string(kContinuationPrefix) +
                                 render_symbol(symbols[i]));
    return out;
  }

  std::vector<std::string> encode_wordpiece(const std::string& word) const {
    std::vector<std::string> chars = utf8_chars(word);
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < chars.size()) {
      std::size_t len = chars.size() - pos;
      std::string match;
      for (; len >= 1; --len) {
        std::string candidate =
            pos == 0 ? std::string() : std::string(kContinuationPrefix);
        for (std::size_t i = pos; i < pos + len; ++i) candidate += chars[i];
        if (vocab_.contains(candidate)) {
          match = std::move(candidate);
          break;
        }
      }
      if (match.empty()) return {std::string(SpecialTokens::unk)};
      out.push_back(std::move(match));
      pos += len;
    }
    return out;
  }

  SubwordMethod method_;
  Vocabulary vocab_;
  MergeTable merges_;
  std::vector<std::string> base_alphabet_;
  std::unordered_map<SymbolPair, std::size_t, SymbolPairHash> merge_rank_;
};

namespace detail {

// Shared trainer state: unique words as symbol sequences plus live pair
// and symbol counts, updated incrementally as merges are applied.
class MergeTrainer {
 public:
  MergeTrainer(std::vector<std::vector<std::string>> words,
               std::vector<std::uint64_t> freqs)
      : words_(std::move(words)), freqs_(std::move(freqs)) {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) add_word(wi);
  }

  // Best mergeable pair under BPE's weighted-frequency criterion, or
  // nullopt when no pair occurs at least twice. Ties prefer the
  // lexicographically smaller left symbol, then right.
  std::optional<SymbolPair> best_by_frequency() const {
    const SymbolPair* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [pair, count] : pair_counts_) {
      if (count < 2) continue;
      if (!best || count > best_count ||
          (count == best_count && pair < *best)) {
        best = &pair;
        best_count = count;
      }
    }
    if (!best) return std::nullopt;
    return *best;
  }

  // Best pair under WordPiece's likelihood criterion:
  // score(a, b) = count(ab) / (count(a) * count(b)).
  std::optional<SymbolPair> best_by_score() const {
    const SymbolPair* best = nullptr;
    __int128 best_num = 0, best_den = 1;
    for (const auto& [pair, count] : pair_counts_) {
      if (count < 2) continue;
      __int128 num = count;
      __int128 den =
          static_cast<__int128>(symbol_counts_.at(pair.first)) *
          static_cast<__int128>(symbol_counts_.at(pair.second));
      // num/den vs best_num/best_den, cross-multiplied.
      __int128 lhs = num * best_den;
      __int128 rhs = best_num * den;
      if (!best || lhs > rhs || (lhs == rhs && pair < *best)) {
        best = &pair;
        best_num = num;
        best_den = den;
      }
    }
    if (!best) return std::nullopt;
    return *best;
  }

  // Replaces every adjacent (left, right) occurrence, left to right, in
  // every word containing the pair. Returns the merged symbol text.
  std::string apply(const SymbolPair& pair, const std::string& merged) {
    auto where_it = where_.find(pair);
    if (where_it == where_.end()) return merged;
    std::vector<std::size_t> affected(where_it->second.begin(),
                                      where_it->second.end());
    for (std::size_t wi : affected) {
      remove_word(wi);
      auto& symbols = words_[wi];
      std::vector<std::string> rebuilt;
      rebuilt.reserve(symbols.size());
      std::size_t i = 0;
      while (i < symbols.size()) {
        if (i + 1 < symbols.size() && symbols[i] == pair.first &&
            symbols[i + 1] == pair.second) {
          rebuilt.push_back(merged);
          i += 2;
        } else {
          rebuilt.push_back(std::move(symbols[i]));
          ++i;
        }
      }
      symbols = std::move(rebuilt);
      add_word(wi);
    }
    return merged;
  }

  std::uint64_t pair_count(const SymbolPair& pair) const {
    auto it = pair_counts_.find(pair);
    return it == pair_counts_.end() ? 0 : it->second;
  }
  std::uint64_t symbol_count(const std::string& symbol) const {
    auto it = symbol_counts_.find(symbol);
    return it == symbol_counts_.end() ? 0 : it->second;
  }

 private:
  void add_word(std::size_t wi) {
    const auto& symbols = words_[wi];
    const std::uint64_t f = freqs_[wi];
    for (const auto& s : symbols) symbol_counts_[s] += f;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      SymbolPair pair{symbols[i], symbols[i + 1]};
      pair_counts_[pair] += f;
      where_[pair].insert(wi);
    }
  }

  void remove_word(std::size_t wi) {
    const auto& symbols = words_[wi];
    const std::uint64_t f = freqs_[wi];
    for (const auto& s : symbols) {
      auto it = symbol_counts_.find(s);
      it->second -= f;
      if (it->second == 0) symbol_counts_.erase(it);
    }
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      SymbolPair pair{symbols[i], symbols[i + 1]};
      auto it = pair_counts_.find(pair);
      it->second -= f;
      if (it->second == 0) pair_counts_.erase(it);
      auto wit = where_.find(pair);
      if (wit != where_.end()) {
        wit->second.erase(wi);
        if (wit->second.empty()) where_.erase(wit);
      }
    }
  }

  std::vector<std::vector<std::string>> words_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<SymbolPair, std::uint64_t, SymbolPairHash> pair_counts_;
  std::unordered_map<std::string, std::uint64_t> symbol_counts_;
  std::unordered_map<SymbolPair, std::unordered_set<std::size_t>,
                     SymbolPairHash>
      where_;
};

}  // namespace detail

inline constexpr std::size_t kByteAlphabetSize = 256;
inline constexpr std::size_t kBpeMinVocab = 5 + kByteAlphabetSize;

// Byte-level BPE. Words are rendered as byte symbols; the pair with the
// highest count-weighted frequency is merged until the vocabulary is full
// or no pair occurs at least twice.
inline SubwordTokenizer train_bpe(const WordCounts& counts,
                                  std::size_t vocab_size,
                                  NormalizationConfig norm = {}) {
  if (vocab_size < kBpeMinVocab)
    throw invalid_argument_error(
        "bpe vocab_size must be at least " + std::to_string(kBpeMinVocab));

  std::vector<std::vector<std::string>> words;
  std::vector<std::uint64_t> freqs;
  for (const auto& [word, freq] : counts.sorted()) {
    std::vector<std::string> symbols;
    symbols.reserve(word.size());
    for (char b : word) symbols.emplace_back(1, b);
    words.push_back(std::move(symbols));
    freqs.push_back(freq);
  }

  Vocabulary vocab;
  std::vector<std::string> base;
  for (unsigned b = 0; b < 256; ++b) {
    vocab.add(byte_token(static_cast<std::uint8_t>(b)));
    base.push_back(byte_token(static_cast<std::uint8_t>(b)));
  }

  detail::MergeTrainer trainer(std::move(words), std::move(freqs));
  MergeTable merges;
  while (vocab.size() < vocab_size) {
    auto pair = trainer.best_by_frequency();
    if (!pair) break;
    std::string merged = pair->first + pair->second;
    trainer.apply(*pair, merged);
    merges.pairs.push_back(*pair);
    std::string rendered = render_symbol(merged);
    if (!vocab.contains(rendered)) vocab.add(rendered);
  }
  return SubwordTokenizer(SubwordMethod::bpe, std::move(vocab),
                          std::move(merges), std::move(base), norm);
}

// Character-level WordPiece. Word-initial characters and "##"-marked
// continuations are distinct symbols; the merged pair maximizes
// count(ab) / (count(a) * count(b)).
inline SubwordTokenizer train_wordpiece(const WordCounts& counts,
                                        std::size_t vocab_size,
                                        NormalizationConfig norm = {}) {
  std::vector<std::vector<std::string>> words;
  std::vector<std::uint64_t> freqs;
  std::set<std::string> base_set;
  for (const auto& [word, freq] : counts.sorted()) {
    std::vector<std::string> symbols;
    auto chars = utf8_chars(word);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      std::string s =
          i == 0 ? chars[i] : std::string(kContinuationPrefix) + chars[i];
      base_set.insert(s);
      symbols.push_back(std::move(s));
    }
    words.push_back(std::move(symbols));
    freqs.push_back(freq);
  }

  const std::size_t min_vocab = 5 + base_set.size();
  if (vocab_size < min_vocab)
    throw invalid_argument_error(
        "wordpiece vocab_size must be at least " + std::to_string(min_vocab) +
        " (5 specials + base alphabet)");

  Vocabulary vocab;
  std::vector<std::string> base(base_set.begin(), base_set.end());
  for (const auto& s : base) vocab.add(s);

  detail::MergeTrainer trainer(std::move(words), std::move(freqs));
  MergeTable merges;
  while (vocab.size() < vocab_size) {
    auto pair = trainer.best_by_score();
    if (!pair) break;
    std::string merged = pair->first + strip_continuation(pair->second);
    trainer.apply(*pair, merged);
    merges.pairs.push_back(*pair);
    if (!vocab.contains(merged)) vocab.add(merged);
  }
  return SubwordTokenizer(SubwordMethod::wordpiece, std::move(vocab),
                          std::move(merges), std::move(base), norm);
}

inline constexpr std::string_view kMergesHeader = "#granul merges v1";

// Merges file (BPE): header line, then "left<SPACE>right" per rank.
// Symbols are rendered through the byte-escape convention and the right
// symbol carries the continuation prefix.
inline void merges_save(const MergeTable& merges, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path);
  out << kMergesHeader << '\n';
  for (const auto& [left, right] : merges.pairs)
    out << render_symbol(left) << ' ' << kContinuationPrefix
        << render_symbol(right) << '\n';
}

inline MergeTable merges_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot read " + path);
  MergeTable merges;
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kMergesHeader)
        throw format_error("bad merges header", line_no);
      continue;
    }
    if (line.empty()) throw format_error("empty line in merges file", line_no);
    auto space = line.find(' ');
    if (space == std::string::npos || space == 0 ||
        line.find(' ', space + 1) != std::string::npos)
      throw format_error("expected \"left right\"", line_no);
    std::string left = line.substr(0, space);
    std::string right = line.substr(space + 1);
    if (right.compare(0, 2, kContinuationPrefix) != 0 || right.size() <= 2)
      throw format_error("right symbol must carry the continuation prefix",
                         line_no);
    try {
      left = parse_symbol(left);
      right = parse_symbol(right.substr(2));
    } catch (const invalid_token_error& e) {
      throw format_error(e.what(), line_no);
    }
    if (!seen.insert(left + "\x1f" + right).second)
      throw format_error("duplicate merge pair", line_no);
    merges.pairs.emplace_back(std::move(left), std::move(right));
  }
  return merges;
}

}  // namespace granul
