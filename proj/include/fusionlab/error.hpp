#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fusionlab {

/// Base class of every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text or spec file. `position` is a byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Ill-sorted term/formula, wrong arity, undeclared symbol.
class SortError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or search exceeded its configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A structure does not belong to the class an operation requires.
class ClassViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace fusionlab
