#pragma once

#include <stdexcept>
#include <string>

namespace fboost {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two function-vectors (or a vector and an objective) live on different sample spaces.
class BindingError : public Error {
 public:
  using Error::Error;
};

// A fit was asked to project the zero function.
class ZeroGradientError : public Error {
 public:
  ZeroGradientError() : Error("zero gradient") {}
};

// A projection or edge computation hit a zero-norm hypothesis or target.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Operation not defined for this objective or learner.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Serialized model/config has the wrong schema tag or shape.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace fboost
