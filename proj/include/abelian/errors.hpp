#pragma once

#include <stdexcept>
#include <string>

namespace abelian {

/// Base class for every error raised by the library.
class AbelianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A group spec, presentation or other input violates its constructor contract.
class InvalidSpecError : public AbelianError {
 public:
  using AbelianError::AbelianError;
};

/// An access the oracle model forbids (unseen label in PS mode, size query in PS mode, ...).
class ModelViolationError : public AbelianError {
 public:
  using AbelianError::AbelianError;
};

class NoElementError : public AbelianError {
 public:
  using AbelianError::AbelianError;
};

/// A caller broke a documented precondition.
class ContractError : public AbelianError {
 public:
  using AbelianError::AbelianError;
};

/// A randomized subroutine did not obtain its certificate within budget.
/// Retrying with a fresh random stream is the intended recovery.
class RandomizedFailure : public AbelianError {
 public:
  using AbelianError::AbelianError;
};

/// Post-condition check failed; indicates a bug rather than bad input.
class InternalInconsistencyError : public AbelianError {
 public:
  using AbelianError::AbelianError;
};

}  // namespace abelian
