#pragma once

#include <stdexcept>

namespace dpp {

// Base class for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent inputs: bad shapes, indices, quotas, kernels
// that are not symmetric positive semidefinite.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Failures discovered while computing: rank collapse, interpolation
// breakdown, degenerate sampling states.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class NotPsd : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class IndexOutOfRange : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Brute-force instance would exceed the enumeration guard.
class TooLarge : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ZeroRow : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class InterpolationResidual : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class DeadEnd : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class RankTooLow : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class EmptySupport : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace dpp
