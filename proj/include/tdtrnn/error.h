#pragma once

#include <stdexcept>
#include <string>

namespace tdtrnn {

// Every error carries the process exit code the CLI maps it to:
// 1 usage/config, 2 data format, 3 numeric failure.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what, 1) {}
};

// Checkpoint/data shapes or vocabularies disagree with the requested task.
class CompatibilityError : public Error {
 public:
  explicit CompatibilityError(const std::string& what) : Error(what, 1) {}
};

// Tensor shape disagreement inside the autodiff engine.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what, 1) {}
};

// Misuse of a stateful object: double backward, missing gradient, ...
class StateError : public Error {
 public:
  explicit StateError(const std::string& what) : Error(what, 1) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what, 2) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what, 2) {}
};

class MalformedTreeError : public DataError {
 public:
  MalformedTreeError(std::size_t sentence, const std::string& reason)
      : DataError("malformed tree in sentence " + std::to_string(sentence) +
                  ": " + reason),
        sentence_(sentence),
        reason_(reason) {}
  std::size_t sentence() const { return sentence_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t sentence_;
  std::string reason_;
};

// Values outside a function's mathematical domain (non-positive probability,
// non-finite loss, score outside [1, K]).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what, 3) {}
};

// Metric undefined for the input (e.g. correlation of a constant sequence).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what) : Error(what, 3) {}
};

}  // namespace tdtrnn
