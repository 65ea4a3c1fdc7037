#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "granul/errors.hpp"

namespace granul {

// Vocabulary-size arithmetic. A vocabulary of |V| tokens with hidden size
// H costs |V| * H embedding parameters; sizes are floored so the budget is
// never exceeded.

// |V| = floor(M * R / H) for a total parameter budget M and ratio R.
inline std::uint64_t vocab_size_total(std::uint64_t total_params, double ratio,
                                      std::uint64_t hidden_size) {
  if (hidden_size == 0) throw invalid_argument_error("hidden_size must be > 0");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw invalid_argument_error("ratio must be in (0, 1)");
  if (total_params == 0)
    throw invalid_argument_error("total_params must be > 0");
  long double v = static_cast<long double>(total_params) * ratio /
                  static_cast<long double>(hidden_size);
  return static_cast<std::uint64_t>(std::floor(v));
}

// |V| = floor(N * R / ((1 - R) * H)) when the non-vocabulary parameter
// count N is held fixed and the vocabulary share of the whole model is R.
inline std::uint64_t vocab_size_fixed_core(std::uint64_t core_params,
                                           double ratio,
                                           std::uint64_t hidden_size) {
  if (hidden_size == 0) throw invalid_argument_error("hidden_size must be > 0");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw invalid_argument_error("ratio must be in (0, 1)");
  if (core_params == 0) throw invalid_argument_error("core_params must be > 0");
  long double v = static_cast<long double>(core_params) * ratio /
                  ((1.0L - static_cast<long double>(ratio)) *
                   static_cast<long double>(hidden_size));
  return static_cast<std::uint64_t>(std::floor(v));
}

inline std::uint64_t embedding_params(std::uint64_t vocab_size,
                                      std::uint64_t hidden_size) {
  return vocab_size * hidden_size;
}

inline double embedding_ratio(std::uint64_t vocab_size,
                              std::uint64_t hidden_size,
                              std::uint64_t total_params) {
  if (total_params == 0)
    throw invalid_argument_error("total_params must be > 0");
  return static_cast<double>(embedding_params(vocab_size, hidden_size)) /
         static_cast<double>(total_params);
}

// Display rule: truncated thousands with a "k" suffix (16,675 -> "16k"),
// exact integers below 1000.
inline std::string format_k(std::uint64_t vocab_size) {
  if (vocab_size < 1000) return std::to_string(vocab_size);
  return std::to_string(vocab_size / 1000) + "k";
}

}  // namespace granul
