#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace scorebands {

/// Base class for all library errors. category() is a stable machine-readable
/// token; the CLI prints it alongside the message.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& message)
      : Error("invalid-input", message) {}
};

/// A skill-score benchmark whose mean is not strictly positive, either in the
/// original sample or in a bootstrap resample.
class DegenerateBenchmarkError : public Error {
 public:
  explicit DegenerateBenchmarkError(const std::string& message)
      : Error("degenerate-benchmark", message) {}
};

/// A bootstrap standard deviation of exactly zero; bands would collapse.
class ZeroSigmaError : public Error {
 public:
  explicit ZeroSigmaError(const std::string& message)
      : Error("zero-sigma", message) {}
};

class DuplicateKeyError : public Error {
 public:
  explicit DuplicateKeyError(const std::string& message)
      : Error("duplicate-key", message) {}
};

class CompletenessError : public Error {
 public:
  explicit CompletenessError(const std::string& message)
      : Error("completeness", message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("parse", message) {}
};

}  // namespace scorebands
