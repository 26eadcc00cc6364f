#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace minimax {

// Shapes of the inputs disagree (parameter blocks, oracle dims, vector lengths).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A NaN or Inf showed up where a finite value is required.
class NonFiniteError : public std::domain_error {
 public:
  NonFiniteError(const std::string& what, std::ptrdiff_t index)
      : std::domain_error(what + " (non-finite entry at index " + std::to_string(index) + ")"),
        index_(index) {}

  std::ptrdiff_t index() const { return index_; }

 private:
  std::ptrdiff_t index_;
};

// The oracle does not provide something the caller asked for (e.g. Hessian blocks).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An iterative numerical routine gave up before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration document failed validation. The message carries the JSON path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace minimax
