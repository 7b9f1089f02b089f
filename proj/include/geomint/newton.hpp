#pragma once

#include <functional>

#include "geomint/types.hpp"

namespace geomint {

enum class JacobianMode { ExactDual, FiniteDifference };

struct NewtonConfig {
  double tol = 1e-12;  // infinity-norm residual bound
  int max_iter = 50;
  JacobianMode jacobian = JacobianMode::ExactDual;
  double fd_step = 1e-7;
};

struct ImplicitProblem {
  std::function<Vec(const Vec&)> residual;
  /// Exact Jacobian; may be empty, in which case (or when the config says
  /// FiniteDifference) central differences with cfg.fd_step are used.
  std::function<Mat(const Vec&)> jacobian;
};

/// Damped Newton with a halving line search (floor 2^-10). Returns x with
/// ||residual(x)||_inf <= cfg.tol; throws NoConvergence or SingularJacobian.
Vec solve_implicit(const ImplicitProblem& problem, const Vec& x0, const NewtonConfig& cfg = {});

}  // namespace geomint
