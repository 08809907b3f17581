#pragma once

#include <stdexcept>
#include <string>

namespace adialab {

// Malformed input: non-self-adjoint terms, bad grids, unknown config keys.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical contract could not be met (step budget, tolerance, refused series).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The tracked spectral band touched the rest of the spectrum.
class GapClosedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Dense ceiling exceeded (too many sites).
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adialab
