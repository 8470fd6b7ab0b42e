#pragma once

#include <stdexcept>
#include <string>

namespace thermvisc {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something malformed: non-finite entries, empty grids,
// mismatched field shapes, kernel radius below the grid spacing.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A well-formed argument outside the mathematical domain, e.g. det B <= 0.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative or adaptive numerical procedure did not reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The simulated state left the admissible set (theta <= 0, det F <= 0,
// non-finite values). Raised by the stepper; the driver halts the run.
class StateError : public Error {
 public:
  using Error::Error;
};

// Configuration file problems. `line` is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace thermvisc
