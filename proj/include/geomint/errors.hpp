#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geomint {

/// Base class of every failure raised by the library. The CLI maps the
/// subtypes below onto its exit-code contract.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (expressions, system specs, run configs).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Expression syntax failure; carries the byte offset into the source text.
class ParseError : public ValidationError {
public:
  ParseError(const std::string& what, std::size_t offset)
      : ValidationError(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Runtime numerical trouble: solver failures, singular matrices, poles,
/// loss of positive definiteness, non-finite states.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Expression evaluation failure (division by zero).
class EvalError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

namespace detail {
std::string short_double(double v);
}

/// Newton iteration exhausted its budget without meeting the tolerance.
class NoConvergence : public NumericalError {
public:
  NoConvergence(int iters, double final_residual)
      : NumericalError("newton: no convergence after " + std::to_string(iters) +
                       " iterations, residual " + detail::short_double(final_residual)),
        iters_(iters),
        final_residual_(final_residual) {}
  int iters() const { return iters_; }
  double final_residual() const { return final_residual_; }

private:
  int iters_;
  double final_residual_;
};

/// Newton hit a singular Jacobian at the given iteration.
class SingularJacobian : public NumericalError {
public:
  explicit SingularJacobian(int at)
      : NumericalError("newton: singular jacobian at iteration " + std::to_string(at)),
        at_(at) {}
  int at() const { return at_; }

private:
  int at_;
};

/// Filesystem / stream failure in the CLI layer.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace geomint
