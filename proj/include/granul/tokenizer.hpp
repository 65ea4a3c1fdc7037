#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "granul/core.hpp"

namespace granul {

// Common surface of the five tokenizer granularities. Models are immutable
// after construction and safe to share across threads.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual const Vocabulary& vocab() const = 0;
  virtual std::string method() const = 0;

  // Tokens for a single pre-tokenized word, in display form
  // ("##"-prefixed continuations where the method uses them).
  virtual std::vector<std::string> encode_word(
      const std::string& word) const = 0;

  // Id for a display token; must succeed for every token encode_word emits.
  virtual int token_id(const std::string& token) const {
    int id = vocab().id_of(token);
    if (id < 0)
      throw invalid_token_error("token not in vocabulary: \"" + token + "\"");
    return id;
  }

  const NormalizationConfig& normalization() const { return norm_; }

  // Normalizes, pre-tokenizes, and encodes a raw document. No CLS/SEP.
  Encoding encode_document(std::string_view raw) const {
    Encoding enc;
    for (const auto& word : pre_tokenize(normalize(raw, norm_))) {
      std::size_t begin = enc.tokens.size();
      for (auto& token : encode_word(word)) {
        enc.ids.push_back(token_id(token));
        enc.tokens.push_back(std::move(token));
      }
      enc.word_spans.emplace_back(begin, enc.tokens.size());
    }
    return enc;
  }

 protected:
  explicit Tokenizer(NormalizationConfig norm) : norm_(norm) {}

  NormalizationConfig norm_;
};

}  // namespace granul
