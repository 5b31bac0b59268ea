#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdesym {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `offset` is the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// A required key or field is missing or has the wrong shape.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a problem invariant (e.g. time in the initial condition).
class SemanticError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFunction : public Error {
 public:
  using Error::Error;
};

class InvalidPosition : public Error {
 public:
  using Error::Error;
};

class DuplicatePosition : public Error {
 public:
  using Error::Error;
};

// Raised by canonicalization when an expression is undefined everywhere it is formed
// (for instance a literal division by zero).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdesym
