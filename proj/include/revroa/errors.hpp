#pragma once

#include <stdexcept>
#include <string>

namespace revroa {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |M_eq| collapsed to ~0; the swing equation is singular at this point.
class DegenerateMass : public Error {
 public:
  using Error::Error;
};

class NoEquilibrium : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Step size fell below the integrator's floor.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// Hard clamping of the PLL frequency is not Lipschitz; backward flow is refused.
class HardSaturationNotReversible : public Error {
 public:
  using Error::Error;
};

class NotHurwitz : public Error {
 public:
  using Error::Error;
};

class SeedTooLarge : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration. `line` is 0 when not tied to a file line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace revroa
