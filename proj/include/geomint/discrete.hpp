#pragma once

#include <optional>

#include "geomint/linsys.hpp"
#include "geomint/newton.hpp"
#include "geomint/types.hpp"

namespace geomint {

/// How the discrete Lagrangian and the discrete constraints sample the
/// continuous data: at the left endpoint or at the interval midpoint.
enum class Discretization { Euler, Midpoint };

/// Result of one constrained-variational step: new configuration, new
/// momentum, and the multiplier that enforced the discrete constraints.
struct DiscreteVakStep {
  Vec q1;
  Vec p1;
  Vec lambda1;
};

/// One step of the discrete constrained-variational dynamics. Solves the
/// coupled system for (q1, lambda1) by Newton with exact dual-number
/// Jacobians, then evaluates p1 explicitly. `lambda_guess` seeds the
/// multiplier (use the previous step's); the position predictor is one
/// explicit Euler step of the induced Hamiltonian flow.
DiscreteVakStep discrete_vakonomic_step(const LinearConstraintSystem& sys, const Vec& q0,
                                        const Vec& p0, Discretization disc, double h,
                                        const std::optional<Vec>& lambda_guess = std::nullopt,
                                        const NewtonConfig& cfg = {});

struct DiscreteNonholonomicStep {
  Vec qnext;
  Vec lambda;
};

/// One step of the discrete reaction-force dynamics (left-endpoint
/// discretization throughout): given two consecutive configurations, solves
/// for the next one and the multiplier, with the constraint one-forms
/// evaluated at the middle configuration.
DiscreteNonholonomicStep discrete_nonholonomic_step(const LinearConstraintSystem& sys,
                                                    const Vec& qprev, const Vec& qcur, double h,
                                                    const std::optional<Vec>& lambda_guess =
                                                        std::nullopt,
                                                    const NewtonConfig& cfg = {});

/// Discrete constraint residuals phi_d(q0, q1) for the given discretization.
Vec discrete_constraint_values(const LinearConstraintSystem& sys, Discretization disc,
                               const Vec& q0, const Vec& q1, double h);

/// Value of the extended discrete Lagrangian on a configuration pair.
double discrete_lagrangian_value(const LinearConstraintSystem& sys, Discretization disc,
                                 const Vec& q0, const Vec& q1, double h);

/// Exact gradient of the discrete Lagrangian with respect to one slot of the
/// configuration pair (0 = departure, 1 = arrival).
Vec discrete_lagrangian_slot_gradient(const LinearConstraintSystem& sys, Discretization disc,
                                      const Vec& q0, const Vec& q1, double h, int slot);

/// Jacobian of the discrete constraints with respect to one slot; k x n.
Mat discrete_constraint_slot_jacobian(const LinearConstraintSystem& sys, Discretization disc,
                                      const Vec& q0, const Vec& q1, double h, int slot);

/// The two momenta the discrete Lagrangian assigns to a configuration pair,
/// in the adapted parameterization (q0 full, free part of q1, multiplier):
/// `minus` is the departure momentum at q0, `plus` the arrival momentum at
/// q1 with the constrained components pinned to the multiplier. Left-endpoint
/// discretization.
PhaseState discrete_legendre_minus(const LinearConstraintSystem& sys, const Vec& q0,
                                   const Vec& q1free, const Vec& mu1, double h);
PhaseState discrete_legendre_plus(const LinearConstraintSystem& sys, const Vec& q0,
                                  const Vec& q1free, const Vec& mu1, double h);

/// Fills in the constrained components of q1 from (q0, q1free) via the
/// left-endpoint discrete constraints.
Vec complete_discrete_configuration(const LinearConstraintSystem& sys, const Vec& q0,
                                    const Vec& q1free);

/// Regularity matrix of the adapted discrete system (mixed second
/// derivatives of the reduced Lagrangian next to the constraint gradients)
/// and its condition number. Reported in diagnostics; not a hard failure.
Mat discrete_regularity_matrix(const LinearConstraintSystem& sys, const Vec& q0,
                               const Vec& q1free, const Vec& mu1, double h);
double discrete_regularity_condition(const LinearConstraintSystem& sys, const Vec& q0,
                                     const Vec& q1free, const Vec& mu1, double h);

}  // namespace geomint
