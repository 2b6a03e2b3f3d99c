#pragma once

#include <stdexcept>
#include <string>

namespace vepsim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameter (counts, lengths, coefficients).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A query outside the domain it is defined on (point location, indices).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Linear or nonlinear solver failure that the caller cannot recover from.
class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration error; `line` is 0 when the offending value came from the
/// command line rather than a file.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace vepsim
