// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairgauge {

/// Base for every error raised by the library. Each subclass maps onto one
/// CLI exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid input: comparison files, rate tables,
/// configuration documents, out-of-range parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Text input that failed to parse; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// No threshold can be solved (e.g. no non-mated comparisons).
class SolverError : public InputError {
 public:
  using InputError::InputError;
};

/// A fairness metric is undefined for the given input (fewer than two groups).
class MetricUndefined : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairgauge
