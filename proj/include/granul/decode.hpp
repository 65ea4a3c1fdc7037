#pragma once

#include <string>
#include <vector>

#include "granul/bytes.hpp"
#include "granul/lexical.hpp"
#include "granul/subword.hpp"
#include "granul/tokenizer.hpp"

namespace granul {

// Inverse of encoding for UNK-free, unwrapped token streams, across all
// five methods. Word boundaries are tokens without a continuation prefix.
inline std::string decode_tokens(const Tokenizer& model,
                                 const std::vector<std::string>& tokens) {
  if (const auto* sub = dynamic_cast<const SubwordTokenizer*>(&model))
    return sub->decode(tokens);

  if (model.method() == "char") {
    std::string out;
    for (const auto& token : tokens) out += static_cast<char>(byte_of_token(token));
    return out;
  }

  // word / morph: vocabulary entries joined back into surface words.
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
    if (model.vocab().id_of(token) < 0)
      throw invalid_token_error("token not in vocabulary: \"" + token + "\"");
    bool continuation = token.compare(0, 2, kContinuationPrefix) == 0;
    if (!continuation) flush();
    word += continuation ? token.substr(2) : token;
  }
  flush();
  return out;
}

}  // namespace granul
