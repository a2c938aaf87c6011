#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depwatch {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Syntax error in Turtle, query, or rule text. Positions are 1-based.
struct ParseError : Error {
  std::size_t line = 0;
  std::size_t col = 0;
  ParseError(const std::string& msg, std::size_t line, std::size_t col)
      : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line),
        col(col) {}
};

/// Structural error while decoding a binary; offset is the file offset of the
/// first byte that could not be interpreted.
struct BinaryParseError : Error {
  std::size_t offset = 0;
  BinaryParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " at byte offset " + std::to_string(offset)),
        offset(offset) {}
};

struct ConfigError : Error {
  using Error::Error;
};

/// Network-level failure that survived the retry budget.
struct TransportError : Error {
  using Error::Error;
};

/// A fixture or API record violated the expected issue schema.
struct IssueSchemaError : Error {
  std::size_t record_index = 0;
  IssueSchemaError(const std::string& msg, std::size_t index)
      : Error(msg + " (record " + std::to_string(index) + ")"),
        record_index(index) {}
};

struct ScanError : Error {
  using Error::Error;
};

}  // namespace depwatch
