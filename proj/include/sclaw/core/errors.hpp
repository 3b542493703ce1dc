#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sclaw {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched grids, wrong array lengths, malformed containers.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input could not be parsed or refers to unknown entities.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A non-finite state appeared while time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(std::size_t step, double time, const std::string& what)
      : Error("blow-up at step " + std::to_string(step) + " (t=" + std::to_string(time) +
              "): " + what),
        step_(step),
        time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace sclaw
