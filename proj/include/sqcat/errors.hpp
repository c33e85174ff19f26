#pragma once

#include <stdexcept>
#include <string>

namespace sqcat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on incompatible spaces or have mismatched dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A Fock truncation is too small for the requested amplitude or squeeze.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Physical parameters violate a model invariant (e.g. squeeze divergence).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical contract could not be honoured (step size, convergence,
/// null-space multiplicity, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The steady-state null space is degenerate and no parity hint was given.
class MultiplicityError : public ContractError {
 public:
  MultiplicityError(const std::string& what, std::size_t multiplicity)
      : ContractError(what), multiplicity_(multiplicity) {}
  std::size_t multiplicity() const noexcept { return multiplicity_; }

 private:
  std::size_t multiplicity_;
};

}  // namespace sqcat
