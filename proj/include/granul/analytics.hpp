#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "granul/corpus.hpp"
#include "granul/tokenizer.hpp"

namespace granul {

// Aggregated diagnostics over a tokenized corpus. Specials are excluded
// from every count.
struct CorpusStats {
  std::string method;
  std::size_t vocab_size = 0;
  std::uint64_t token_count = 0;
  std::uint64_t word_count = 0;
  std::uint64_t unk_count = 0;
  double unk_ratio = 0.0;
  double fertility = 0.0;       // mean tokens per word
  double seq_mean = 0.0;        // per-document token counts
  std::uint64_t seq_p50 = 0;
  std::uint64_t seq_p95 = 0;
  std::uint64_t seq_max = 0;
};

namespace detail {

inline std::uint64_t percentile(std::vector<std::uint64_t>& sorted,
                                double p) {
  if (sorted.empty()) return 0;
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(sorted.size())));
  if (rank == 0) rank = 1;
  return sorted[std::min(rank, sorted.size()) - 1];
}

}  // namespace detail

// Tokenizes every document (no CLS/SEP) and aggregates counts. Integer
// counts are additive over any corpus partition.
inline CorpusStats compute_stats(const Tokenizer& model,
                                 const std::vector<Document>& docs) {
  CorpusStats stats;
  stats.method = model.method();
  stats.vocab_size = model.vocab().size();
  std::vector<std::uint64_t> seq_lengths;
  seq_lengths.reserve(docs.size());
  for (const auto& doc : docs) {
    Encoding enc = model.encode_document(doc.text);
    stats.token_count += enc.ids.size();
    stats.word_count += enc.word_spans.size();
    for (int id : enc.ids)
      if (id == SpecialTokens::unk_id) ++stats.unk_count;
    seq_lengths.push_back(enc.ids.size());
  }
  if (stats.token_count > 0)
    stats.unk_ratio = static_cast<double>(stats.unk_count) /
                      static_cast<double>(stats.token_count);
  if (stats.word_count > 0)
    stats.fertility = static_cast<double>(stats.token_count) /
                      static_cast<double>(stats.word_count);
  if (!seq_lengths.empty()) {
    std::uint64_t sum = 0;
    for (auto n : seq_lengths) sum += n;
    stats.seq_mean =
        static_cast<double>(sum) / static_cast<double>(seq_lengths.size());
    std::sort(seq_lengths.begin(), seq_lengths.end());
    stats.seq_p50 = detail::percentile(seq_lengths, 0.50);
    stats.seq_p95 = detail::percentile(seq_lengths, 0.95);
    stats.seq_max = seq_lengths.back();
  }
  return stats;
}

inline nlohmann::json stats_json(const CorpusStats& stats) {
  return nlohmann::json{{"method", stats.method},
                        {"vocab_size", stats.vocab_size},
                        {"unk_ratio", stats.unk_ratio},
                        {"fertility", stats.fertility},
                        {"seq_mean", stats.seq_mean},
                        {"seq_p50", stats.seq_p50},
                        {"seq_p95", stats.seq_p95},
                        {"seq_max", stats.seq_max},
                        {"token_count", stats.token_count},
                        {"unk_count", stats.unk_count}};
}

inline std::string stats_text(const CorpusStats& stats) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "method" << stats.method << '\n'
      << std::setw(12) << "vocab_size" << stats.vocab_size << '\n'
      << std::setw(12) << "tokens" << stats.token_count << '\n'
      << std::setw(12) << "words" << stats.word_count << '\n'
      << std::setw(12) << "unk" << stats.unk_count << '\n'
      << std::setw(12) << "unk_ratio" << std::fixed << std::setprecision(6)
      << stats.unk_ratio << '\n'
      << std::setw(12) << "fertility" << stats.fertility << '\n'
      << std::setw(12) << "seq_mean" << stats.seq_mean << '\n'
      << std::setw(12) << "seq_p50" << stats.seq_p50 << '\n'
      << std::setw(12) << "seq_p95" << stats.seq_p95 << '\n'
      << std::setw(12) << "seq_max" << stats.seq_max << '\n';
  return out.str();
}

struct ComparisonRow {
  std::string method;
  std::vector<std::string> tokens;
};

// One row per model for a single sentence. The byte model lists the
// normalized characters bare; every other method is wrapped in CLS/SEP.
inline std::vector<ComparisonRow> compare(
    const std::vector<const Tokenizer*>& models, std::string_view sentence) {
  std::vector<ComparisonRow> rows;
  for (const Tokenizer* model : models) {
    ComparisonRow row;
    row.method = model->method();
    if (model->method() == "char") {
      std::string normalized = normalize(sentence, model->normalization());
      for (const auto& ch : utf8_chars(normalized)) row.tokens.push_back(ch);
    } else {
      Encoding enc = model->encode_document(sentence);
      row.tokens.emplace_back(SpecialTokens::cls);
      for (auto& t : enc.tokens) row.tokens.push_back(std::move(t));
      row.tokens.emplace_back(SpecialTokens::sep);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, row.method.size());
  std::ostringstream out;
  for (const auto& row : rows) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << row.method;
    for (std::size_t i = 0; i < row.tokens.size(); ++i)
      out << (i ? " " : "") << '"' << row.tokens[i] << '"';
    out << '\n';
  }
  return out.str();
}

// GPU energy accounting: kWh from nameplate wattage, GHG mass from a
// grid conversion factor, and social cost of carbon from a per-ton rate.
struct EnergyReport {
  std::uint32_t gpu_count = 0;
  double hours = 0.0;
  double watts_per_gpu = 250.0;
  double kwh = 0.0;
};

inline EnergyReport energy(std::uint32_t gpu_count, double hours,
                           double watts_per_gpu = 250.0) {
  if (hours < 0 || watts_per_gpu < 0)
    throw invalid_argument_error("energy inputs must be nonnegative");
  EnergyReport report{gpu_count, hours, watts_per_gpu, 0.0};
  report.kwh = static_cast<double>(gpu_count) * hours * watts_per_gpu / 1000.0;
  return report;
}

inline double ghg(double kwh, double kg_co2_per_kwh) {
  if (kwh < 0 || kg_co2_per_kwh < 0)
    throw invalid_argument_error("ghg inputs must be nonnegative");
  return kwh * kg_co2_per_kwh;
}

inline double scc(double kg_co2, double usd_per_ton) {
  if (kg_co2 < 0 || usd_per_ton < 0)
    throw invalid_argument_error("scc inputs must be nonnegative");
  return kg_co2 / 1000.0 * usd_per_ton;
}

}  // namespace granul
