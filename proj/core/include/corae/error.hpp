#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace corae {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimecodeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A log that is malformed or breaks one of the annotation invariants.
// `record_index` is set when the problem is tied to a specific record.
class LogError : public Error {
 public:
  LogError(std::string message, std::optional<std::size_t> record_index = std::nullopt)
      : Error(std::move(message)), record_index_(record_index) {}

  std::optional<std::size_t> record_index() const noexcept { return record_index_; }

 private:
  std::optional<std::size_t> record_index_;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace corae
