#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treegibbs {

/// Root of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is a byte offset into the source.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error("syntax error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  UnknownIdentifier(std::size_t offset, std::string name)
      : SyntaxError(offset, "unknown identifier '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Evaluation produced a value outside the domain of an operation, or a
/// non-finite intermediate. `offset` points at the offending node.
class DomainError : public Error {
 public:
  DomainError(std::size_t offset, const std::string& message)
      : Error("domain error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class MissingBinding : public Error {
 public:
  explicit MissingBinding(char variable)
      : Error(std::string("no binding for variable '") + variable + "'"), variable_(variable) {}
  char variable() const noexcept { return variable_; }

 private:
  char variable_;
};

/// A kernel or operator value overflowed to a non-finite number.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Structural misuse of an expression (wrong variable set) or of a kernel.
class KernelError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// A candidate ratio is not a root of the reduced cubic: the plane map defect
/// does not vanish after correction.
class InconsistentRoot : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace treegibbs
