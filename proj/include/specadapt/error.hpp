#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specadapt {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Data rows are numbered from 1 with the header as
// row 0; the message also carries the 1-based file line.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + " (line " + std::to_string(row + 1) + "): " + what),
        row_(row) {}

  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace specadapt
