#pragma once

#include "geomint/hamiltonian.hpp"
#include "geomint/newton.hpp"
#include "geomint/types.hpp"

namespace geomint {

/// The flat-space benchmark with Hamiltonian
///   H = 1/2 ((p_x + p_z y^2/2)^2 + p_y^2/(1+beta x)^2)
/// on coordinates (x, y, z). Everything is valid away from the metric pole
/// 1 + beta x = 0, which is checked on every evaluation.
struct MartinetSystem {
  double beta = 0.0;
};

double martinet_hamiltonian(const MartinetSystem& sys, const PhaseState& state);

/// Hand-written canonical field; the momentum conjugate to z is conserved
/// exactly (z is cyclic).
std::pair<Vec, Vec> martinet_rhs(const MartinetSystem& sys, const PhaseState& state);

/// Fiber derivative (q, p) -> (q, dH/dp). Its image always satisfies
/// vz = (y^2/2) vx, the velocity constraint of the underlying distribution.
TangentState fiber_derivative(const MartinetSystem& sys, const PhaseState& state);

/// p . dH/dp - H. Because H is quadratic in p this equals H numerically, and
/// it coincides with the constrained Lagrangian evaluated on the fiber
/// derivative: 1/2 (vx^2 + (1+beta x)^2 vy^2).
double recovered_lagrangian(const MartinetSystem& sys, const PhaseState& state);

/// Constrained Lagrangian of the recovered structure on a tangent state.
double martinet_lagrangian(const MartinetSystem& sys, const Vec& q, double vx, double vy);

struct MartinetDiscreteLagrangian {
  double value;
  double constraint_residual;  // (z1-z0) - (y0^2/2)(x1-x0)
};

/// Generating value of one left-endpoint step on a configuration pair that
/// satisfies the discrete constraint: the momentum is recovered by inverting
/// the step's position equations (the component along the constraint fiber
/// is immaterial and fixed to zero), then the generating function is
/// evaluated there. Pairs off the constraint by more than 1e-8 are rejected
/// with the residual in the message.
MartinetDiscreteLagrangian martinet_discrete_lagrangian(const MartinetSystem& sys, const Vec& q0,
                                                        const Vec& q1, double h);

struct MartinetVerletSubsteps {
  PhaseState half;
  PhaseState full;
  double ld_plus;          // generating value of the first half step
  double ld_minus;         // generating value of the second half step
  double residual_first;   // (z_half - z0)   - (y0^2/2)(x_half - x0)
  double residual_second;  // (z1 - z_half) - (y1^2/2)(x1 - x_half)
};

/// The two half steps the three-stage scheme is composed of, with the
/// generating values of each half and the two discrete-constraint residuals
/// their configuration pairs satisfy.
MartinetVerletSubsteps martinet_verlet_substeps(const MartinetSystem& sys, const PhaseState& s,
                                                double h, const NewtonConfig& cfg = {});

class MartinetHamiltonian final : public HamiltonianSystem {
public:
  explicit MartinetHamiltonian(MartinetSystem sys) : sys_(sys) {}

  const MartinetSystem& system() const { return sys_; }

  int dim() const override { return 3; }
  double value(const Vec& q, const Vec& p) const override;
  void gradient(const Vec& q, const Vec& p, Vec& dq, Vec& dp) const override;
  void hessian(const Vec& q, const Vec& p, Mat& qq, Mat& qp, Mat& pp) const override;

private:
  MartinetSystem sys_;
};

}  // namespace geomint
