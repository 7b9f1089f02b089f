#pragma once

#include "geomint/hamiltonian.hpp"
#include "geomint/newton.hpp"
#include "geomint/types.hpp"

namespace geomint {

/// First-order symplectic Euler: the Hamiltonian derivatives are taken at
/// (old q, new p), so the momentum update is implicit and the position
/// update explicit.
PhaseState symplectic_euler_step(const HamiltonianSystem& h, const PhaseState& s, double step,
                                 const NewtonConfig& cfg = {});

/// The adjoint variant: derivatives at (new q, old p); implicit in q.
PhaseState symplectic_euler_adjoint_step(const HamiltonianSystem& h, const PhaseState& s,
                                         double step, const NewtonConfig& cfg = {});

/// Implicit midpoint rule; second order, implicit in (q, p) jointly.
PhaseState midpoint_step(const HamiltonianSystem& h, const PhaseState& s, double step,
                         const NewtonConfig& cfg = {});

/// Three-stage Stormer-Verlet scheme with an intermediate momentum; equals
/// the composition of the two symplectic Euler variants over half steps.
PhaseState stormer_verlet_step(const HamiltonianSystem& h, const PhaseState& s, double step,
                               const NewtonConfig& cfg = {});

/// Verlet with the intermediate states exposed, for the substep analyses.
struct VerletStages {
  PhaseState half;  // (q_half, p_half)
  PhaseState full;
};
VerletStages stormer_verlet_stages(const HamiltonianSystem& h, const PhaseState& s, double step,
                                   const NewtonConfig& cfg = {});

/// Explicit Euler; not symplectic, kept as the control case for the
/// symplecticity diagnostics.
PhaseState explicit_euler_step(const HamiltonianSystem& h, const PhaseState& s, double step);

}  // namespace geomint
