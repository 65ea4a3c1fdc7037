#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "granul/core.hpp"
#include "granul/errors.hpp"

namespace granul {

struct Document {
  std::size_t id = 0;
  std::string text;
};

enum class CorpusFormat { line, blank_line };

inline CorpusFormat corpus_format_from_string(const std::string& name) {
  if (name == "line") return CorpusFormat::line;
  if (name == "blank-line") return CorpusFormat::blank_line;
  throw invalid_argument_error("unknown corpus format: " + name);
}

// Streams documents out of a plain-text file. Line format yields one
// document per non-empty line; blank-line format groups consecutive
// non-blank lines.
class DocumentReader {
 public:
  DocumentReader(const std::string& path, CorpusFormat format)
      : in_(path, std::ios::binary), format_(format), path_(path) {
    if (!in_) throw error("cannot read " + path);
  }

  std::optional<Document> next() {
    std::string line;
    if (format_ == CorpusFormat::line) {
      while (read_line(line)) {
        if (line.empty()) continue;
        return Document{next_id_++, std::move(line)};
      }
      return std::nullopt;
    }
    std::string body;
    while (read_line(line)) {
      if (line.empty()) {
        if (!body.empty()) return Document{next_id_++, std::move(body)};
        continue;
      }
      if (!body.empty()) body += '\n';
      body += line;
    }
    if (!body.empty()) return Document{next_id_++, std::move(body)};
    return std::nullopt;
  }

  std::vector<Document> all() {
    std::vector<Document> docs;
    while (auto doc = next()) docs.push_back(std::move(*doc));
    return docs;
  }

 private:
  bool read_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto offset = detail::find_invalid_utf8(line))
      throw malformed_input_error("invalid UTF-8 in " + path_,
                                  line_start_ + *offset);
    line_start_ += line.size() + 1;
    return true;
  }

  std::ifstream in_;
  CorpusFormat format_;
  std::string path_;
  std::size_t next_id_ = 0;
  std::size_t line_start_ = 0;
};

inline std::vector<Document> ingest(const std::string& path,
                                    CorpusFormat format) {
  return DocumentReader(path, format).all();
}

// Keep/drop predicate; must be deterministic for a fixed document.
struct DocumentFilter {
  std::function<bool(const Document&)> keep;
  std::string name;
};

inline DocumentFilter keep_all_filter() {
  return {[](const Document&) { return true; }, "none"};
}

// Keeps a document iff at least `threshold` of its alphabetic characters
// belong to the Turkish alphabet. Documents without letters are dropped.
inline DocumentFilter turkish_heuristic_filter(double threshold = 0.9) {
  static const std::unordered_set<UChar32> turkish_letters = [] {
    std::unordered_set<UChar32> set;
    const char32_t extra[] = {U'ç', U'Ç', U'ğ', U'Ğ', U'ı', U'İ',
                              U'ö', U'Ö', U'ş', U'Ş', U'ü', U'Ü'};
    for (char32_t c = U'a'; c <= U'z'; ++c)
      if (c != U'q' && c != U'w' && c != U'x') set.insert(c);
    for (char32_t c = U'A'; c <= U'Z'; ++c)
      if (c != U'Q' && c != U'W' && c != U'X') set.insert(c);
    for (char32_t c : extra) set.insert(c);
    return set;
  }();
  auto keep = [threshold](const Document& doc) {
    std::size_t letters = 0, turkish = 0;
    const char* s = doc.text.data();
    const auto n = static_cast<std::int32_t>(doc.text.size());
    std::int32_t i = 0;
    while (i < n) {
      UChar32 cp;
      U8_NEXT(s, i, n, cp);
      if (cp < 0 || !u_isalpha(cp)) continue;
      ++letters;
      if (turkish_letters.count(cp)) ++turkish;
    }
    if (letters == 0) return false;
    return static_cast<double>(turkish) >=
           threshold * static_cast<double>(letters);
  };
  return {keep, "turkish-heuristic"};
}

struct FilterResult {
  std::vector<Document> kept;
  std::size_t dropped = 0;
};

inline FilterResult filter_documents(std::vector<Document> docs,
                                     const DocumentFilter& filter) {
  FilterResult result;
  for (auto& doc : docs) {
    if (filter.keep(doc))
      result.kept.push_back(std::move(doc));
    else
      ++result.dropped;
  }
  return result;
}

// Word -> occurrence count over a normalized, pre-tokenized corpus.
struct WordCounts {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total_words = 0;

  void add(const std::string& word, std::uint64_t n = 1) {
    counts[word] += n;
    total_words += n;
  }

  // Entries sorted by descending count, then lexicographic word.
  std::vector<std::pair<std::string, std::uint64_t>> sorted() const {
    std::vector<std::pair<std::string, std::uint64_t>> v(counts.begin(),
                                                         counts.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    return v;
  }
};

inline std::size_t resolve_thread_count(std::size_t requested) {
  if (requested != 0) return requested;
  std::size_t hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Thread count from GRANUL_THREADS (0 or unset = auto).
inline std::size_t configured_threads() {
  const char* env = std::getenv("GRANUL_THREADS");
  if (!env || !*env) return resolve_thread_count(0);
  return resolve_thread_count(
      static_cast<std::size_t>(std::strtoull(env, nullptr, 10)));
}

// Normalizes and pre-tokenizes every document and aggregates word counts.
// Sharded across threads; the merge is plain addition, so the result is
// independent of document order and thread count.
inline WordCounts count_words(const std::vector<Document>& docs,
                              const NormalizationConfig& norm = {},
                              std::size_t threads = 0) {
  threads = std::min(resolve_thread_count(threads),
                     std::max<std::size_t>(docs.size(), 1));

  auto count_range = [&](std::size_t begin, std::size_t end, WordCounts& out) {
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& word : pre_tokenize(normalize(docs[i].text, norm)))
        out.add(word);
  };

  if (threads <= 1) {
    WordCounts counts;
    count_range(0, docs.size(), counts);
    return counts;
  }

  std::vector<WordCounts> shards(threads);
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  const std::size_t chunk = (docs.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = std::min(begin + chunk, docs.size());
    workers.emplace_back([&, begin, end, t] {
      try {
        count_range(begin, end, shards[t]);
      } catch (...) {
        failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);

  WordCounts merged;
  for (const auto& shard : shards)
    for (const auto& [word, n] : shard.counts) merged.add(word, n);
  return merged;
}

// TSV cache: "word<TAB>count", descending count then lexicographic word.
inline void word_counts_save(const WordCounts& counts,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path);
  for (const auto& [word, n] : counts.sorted())
    out << word << '\t' << n << '\n';
}

inline WordCounts word_counts_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot read " + path);
  WordCounts counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw format_error("expected \"word<TAB>count\"", line_no);
    std::uint64_t n = 0;
    try {
      n = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw format_error("bad count", line_no);
    }
    if (n == 0) throw format_error("count must be positive", line_no);
    if (counts.counts.count(line.substr(0, tab)))
      throw format_error("duplicate word", line_no);
    counts.add(line.substr(0, tab), n);
  }
  return counts;
}

}  // namespace granul
