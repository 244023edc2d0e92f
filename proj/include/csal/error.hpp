#pragma once

#include <stdexcept>
#include <string>

namespace csal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input or configuration violates a documented precondition.
struct ValidationError : Error {
  using Error::Error;
};

// Malformed file contents; carries the 1-based position when known.
struct FormatError : Error {
  FormatError(const std::string& what, long row = 0, long column = 0)
      : Error(what), row(row), column(column) {}
  long row;
  long column;
};

// NaN/Inf or a singular matrix showed up inside an iteration.
struct NumericError : Error {
  NumericError(const std::string& what, int iteration = -1, int component = -1)
      : Error(what), iteration(iteration), component(component) {}
  int iteration;
  int component;
};

}  // namespace csal
