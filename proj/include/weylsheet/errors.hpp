#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weylsheet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed surface or density expression. `position` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Invalid argument or precondition (bad parameter, point outside a chart, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Geometric degeneracy: singular metric, r_1 ∥ r_2, det b = 0, vanishing curvature.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Solver failure: non-convergence, incompatible periodic data, non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File access or file format problem.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace weylsheet
