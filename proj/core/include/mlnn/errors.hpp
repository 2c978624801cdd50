#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mlnn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity reached a parameter block, gradient, or loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlnn
