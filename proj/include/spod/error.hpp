#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spod {

/// Base of all library exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition: bad shapes, mismatched grids, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Non-finite intermediate values, division by a zero norm, and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Threshold search found no crossing in one snapshot column.
class NoCrossing : public Error {
 public:
  explicit NoCrossing(std::ptrdiff_t column)
      : Error("no threshold crossing in column " + std::to_string(column)),
        column_(column) {}

  std::ptrdiff_t column() const noexcept { return column_; }

 private:
  std::ptrdiff_t column_;
};

}  // namespace spod
