#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace venuerisk {

// Error hierarchy. Everything thrown by the library derives from Error, so
// callers that only care about success/failure can catch one type. The CLI
// maps IoError to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid function argument (non-positive volume, factor < 1, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A single malformed input row. Carries the 1-based line number.
class RecordError : public Error {
 public:
  RecordError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Problem with a dataset as a whole: duplicate keys, dangling references.
class DatasetError : public Error {
 public:
  explicit DatasetError(const std::string& what, std::vector<std::string> ids = {})
      : Error(what), ids_(std::move(ids)) {}

  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// Unparseable scenario or parameter file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace venuerisk
