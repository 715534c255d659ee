#ifndef BVP4_ERRORS_HPP
#define BVP4_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bvp4 {

/// Base class for all errors raised by the solver.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization met a pivot below the working-precision threshold.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// An input lies outside the domain of an operation (bad interval, bad index,
/// vanishing leading coefficient, evaluation point out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An internal iteration failed to converge. Indicates a bug, not bad input.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace bvp4

#endif  // BVP4_ERRORS_HPP
