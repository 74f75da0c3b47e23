#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace casc {

// Invalid run configuration: bad flag values, mismatched config fingerprints.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure carrying file and line context.
class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what) {}
};

// Numerical failure: singular fits, non-finite intermediate results.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace casc
