#pragma once

#include <functional>
#include <utility>

#include "geomint/hamiltonian.hpp"
#include "geomint/linsys.hpp"
#include "geomint/types.hpp"

namespace geomint {

/// Admission tolerance for velocity states handed to the nonholonomic
/// dynamics; states violating the constraints by more than this are
/// rejected rather than silently projected.
inline constexpr double kConstraintAdmissionTol = 1e-8;

/// State of the reduced constrained-variational flow: configuration, free
/// velocities, and the momenta conjugate to the constrained directions.
struct ExtendedVakState {
  Vec q;
  Vec vfree;
  Vec pcon;
};

/// phi^alpha(q, v) = v^alpha - Gamma^alpha_a(q) v^a, one residual per
/// constraint.
Vec constraint_values(const LinearConstraintSystem& sys, const Vec& q, const Vec& v);

/// Rejects initial data violating the constraints beyond the admission
/// tolerance. Called where a reaction-force run starts; the right-hand side
/// itself stays evaluable slightly off the constraint surface because
/// one-step schemes probe such states internally.
void require_admissible(const LinearConstraintSystem& sys, const TangentState& s);

/// Canonical right-hand side (dq/dt, dp/dt) of the induced Hamiltonian.
std::pair<Vec, Vec> hamiltonian_rhs(const LinearConstraintSystem& sys, const PhaseState& state);

struct VakonomicRhs {
  Vec qdot;      // full, constrained components reconstructed
  Vec vfreedot;  // accelerations of the free block
  Vec pcondot;   // multiplier momenta
};

/// Reduced constrained-variational equations: the free accelerations solve a
/// dense SPD system with the reduced metric as matrix; constrained
/// velocities follow the constraints; the conjugate momenta evolve
/// explicitly.
VakonomicRhs vakonomic_rhs(const LinearConstraintSystem& sys, const ExtendedVakState& s);

struct NonholonomicRhs {
  Vec vdot;
  Vec lambda;
};

/// Reaction-force dynamics: accelerations and multipliers solve the saddle
/// system  g a = F + A^T lambda,  A a = -(dA/dt) v,  where A is the
/// velocity-gradient of the constraints. The multiplier matrix A g^{-1} A^T
/// is SPD for an SPD metric and full-rank constraints; singularity is
/// detected and reported anyway. The state must already satisfy the
/// constraints within the admission tolerance.
NonholonomicRhs nonholonomic_rhs(const LinearConstraintSystem& sys, const TangentState& s);

/// Autonomous first-order field on a flat vector state.
struct OdeField {
  int dim = 0;
  std::function<Vec(const Vec&)> f;
};

/// One classical fourth-order Runge-Kutta step.
Vec rk4_step(const OdeField& field, const Vec& y, double h);

/// Fixed-step RK4 trajectory; the reference solution generator for every
/// convergence test. Aborts with the step index if the state leaves the
/// finite range. Rows are the flat states under the given block layout
/// (default: one block named "state").
Trajectory oracle_integrate(const OdeField& field, const Vec& y0, double h, int steps,
                            std::vector<std::pair<std::string, int>> blocks = {});

// Flattening adapters. Layouts: hamiltonian [q p], vakonomic [q vfree pcon],
// nonholonomic [q v].
OdeField hamiltonian_field(const LinearConstraintSystem& sys);
OdeField vakonomic_field(const LinearConstraintSystem& sys);
OdeField nonholonomic_field(const LinearConstraintSystem& sys);
OdeField hamiltonian_field(const HamiltonianSystem& h);

Vec pack_phase(const PhaseState& s);
PhaseState unpack_phase(const Vec& y, int n);
Vec pack_vak(const ExtendedVakState& s);
ExtendedVakState unpack_vak(const Vec& y, const IndexSplit& split);
Vec pack_tangent(const TangentState& s);
TangentState unpack_tangent(const Vec& y, int n);

/// Pushes one vakonomic state and its flow direction through the Legendre
/// map: returns (dq/dt, dp/dt) of the image curve. Used to test that the
/// constrained-variational flow and the Hamiltonian flow are the same
/// dynamics seen in different coordinates.
std::pair<Vec, Vec> legendre_pushforward_rate(const LinearConstraintSystem& sys,
                                              const ExtendedVakState& s);

}  // namespace geomint
