#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace granul {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when input bytes are not valid UTF-8. Carries the offset of the
// first offending byte.
class malformed_input_error : public error {
 public:
  malformed_input_error(const std::string& what, std::size_t byte_offset)
      : error(what + " at byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Raised when a serialized file (vocab, merges, lexicon, counts, meta)
// violates its format. line() is 1-based; 0 means "not line-specific".
class format_error : public error {
 public:
  explicit format_error(const std::string& what, std::size_t line = 0)
      : error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class invalid_argument_error : public error {
 public:
  explicit invalid_argument_error(const std::string& what) : error(what) {}
};

// Raised when decoding meets a token that is not in the vocabulary, or a
// reserved id.
class invalid_token_error : public error {
 public:
  explicit invalid_token_error(const std::string& what) : error(what) {}
};

}  // namespace granul
