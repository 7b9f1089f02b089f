#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "geomint/discrete.hpp"
#include "geomint/hamiltonian.hpp"
#include "geomint/linsys.hpp"
#include "geomint/types.hpp"

namespace geomint {

struct DiagnosticReport {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // value <= tolerance, set by make_report
  std::map<std::string, std::string> context;
};

DiagnosticReport make_report(std::string name, double value, double tolerance,
                             std::map<std::string, std::string> context = {});

/// One-step map on phase states, with the step size bound in by the caller.
using OneStepMap = std::function<PhaseState(const PhaseState&)>;

/// || DPhi^T J DPhi - J ||, entrywise max, with DPhi by central finite
/// differences of the full step (inner solves included) and J the canonical
/// skew block matrix.
double symplecticity_defect(const OneStepMap& step, const PhaseState& state, double fd_step);

/// (max, final) of |H(t) - H(0)| along a trajectory with q and p blocks.
std::pair<double, double> energy_drift(const std::function<double(const Vec&, const Vec&)>& h,
                                       const Trajectory& traj);

enum class ResidualKind { Continuous, Discrete };

/// Max over samples of the constraint residual: velocity blocks for the
/// continuous kind, consecutive configuration pairs for the discrete kind
/// (whose sampling rule is the given discretization).
double constraint_residual(const LinearConstraintSystem& sys, const Trajectory& traj,
                           ResidualKind kind, Discretization disc = Discretization::Euler);

/// Least-squares slope of log(endpoint error) against log(h); the reference
/// endpoint comes from the fourth-order oracle at a much finer step.
double convergence_order(const std::function<PhaseState(const PhaseState&, double)>& step,
                         const HamiltonianSystem& hsys, const PhaseState& start, double total_time,
                         const std::vector<double>& h_list);

/// Deterministic splitmix64 generator; identical streams on every platform,
/// which keeps the randomized diagnostics reproducible.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform(double lo, double hi);

private:
  std::uint64_t state_;
};

/// Random phase state with |q|, |p| <= 2 componentwise; `pole_coord`, when
/// non-negative, is re-drawn until 1 + pole_scale * q[pole_coord] >= 0.5.
PhaseState random_phase_state(Rng& rng, int n, int pole_coord = -1, double pole_scale = 0.0);

}  // namespace geomint
