#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>

#include "granul/lexical.hpp"
#include "granul/subword.hpp"
#include "granul/tokenizer.hpp"

namespace granul {

// Model directory layout:
//   meta.txt    key=value lines: method, vocab_size, lowercase[, lexicon]
//   vocab.txt   one token per line
//   merges.txt  bpe only
//   lexicon.tsv morph only

inline const char* kMetaFile = "meta.txt";
inline const char* kVocabFile = "vocab.txt";
inline const char* kMergesFile = "merges.txt";
inline const char* kLexiconFile = "lexicon.tsv";

inline void save_model(const Tokenizer& model, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);

  std::ofstream meta(base / kMetaFile, std::ios::binary);
  if (!meta) throw error("cannot write " + (base / kMetaFile).string());
  meta << "method=" << model.method() << '\n'
       << "vocab_size=" << model.vocab().size() << '\n'
       << "lowercase=" << (model.normalization().lowercase ? "true" : "false")
       << '\n';

  vocab_save(model.vocab(), (base / kVocabFile).string());

  if (const auto* sub = dynamic_cast<const SubwordTokenizer*>(&model);
      sub && sub->subword_method() == SubwordMethod::bpe)
    merges_save(sub->merges(), (base / kMergesFile).string());

  if (const auto* lex = dynamic_cast<const LexicalTokenizer*>(&model);
      lex && lex->lexical_method() == LexicalMethod::morph) {
    meta << "lexicon=" << kLexiconFile << '\n';
    lexicon_save(lex->lexicon(), (base / kLexiconFile).string());
  }
}

namespace detail {

inline std::map<std::string, std::string> read_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot read " + path);
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw format_error("expected key=value in meta file", line_no);
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

}  // namespace detail

inline std::unique_ptr<Tokenizer> load_model(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  auto meta = detail::read_meta((base / kMetaFile).string());

  auto require = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end())
      throw format_error(std::string("meta file missing key: ") + key);
    return it->second;
  };
  const std::string& method = require("method");
  NormalizationConfig norm;
  norm.lowercase = require("lowercase") == "true";

  const bool has_merges = fs::exists(base / kMergesFile);
  if (has_merges != (method == "bpe"))
    throw format_error(has_merges ? "merges.txt present for non-bpe model"
                                  : "merges.txt missing for bpe model");

  Vocabulary vocab = vocab_load((base / kVocabFile).string());

  if (method == "char") {
    ByteTokenizer model(norm);
    if (!(model.vocab() == vocab))
      throw format_error("vocab.txt does not match the byte vocabulary");
    return std::make_unique<ByteTokenizer>(norm);
  }
  if (method == "bpe") {
    MergeTable merges = merges_load((base / kMergesFile).string());
    std::vector<std::string> alphabet;
    for (unsigned b = 0; b < 256; ++b)
      alphabet.push_back(byte_token(static_cast<std::uint8_t>(b)));
    return std::make_unique<SubwordTokenizer>(SubwordMethod::bpe,
                                              std::move(vocab),
                                              std::move(merges),
                                              std::move(alphabet), norm);
  }
  if (method == "wordpiece")
    return std::make_unique<SubwordTokenizer>(
        SubwordMethod::wordpiece, std::move(vocab), MergeTable{},
        std::vector<std::string>{}, norm);
  if (method == "word")
    return std::make_unique<LexicalTokenizer>(LexicalMethod::word,
                                              std::move(vocab),
                                              SegmentationLexicon{}, norm);
  if (method == "morph") {
    SegmentationLexicon lexicon =
        lexicon_load((base / require("lexicon")).string());
    return std::make_unique<LexicalTokenizer>(LexicalMethod::morph,
                                              std::move(vocab),
                                              std::move(lexicon), norm);
  }
  throw format_error("unknown method in meta file: " + method);
}

}  // namespace granul
