#include "geomint/martinet.hpp"

#include "geomint/autodiff.hpp"
#include "geomint/integrators.hpp"

namespace geomint {

namespace {

double pole_factor(const MartinetSystem& sys, double x) {
  double f = 1.0 + sys.beta * x;
  if (f == 0.0) throw NumericalError("metric pole: 1 + beta*x vanished at x=" + std::to_string(x));
  return f;
}

/// Templated Hamiltonian over packed (q, p); feeds the dual-number Hessian.
template <class T>
T martinet_packed(double beta, const std::vector<T>& qp) {
  const T& x = qp[0];
  const T& y = qp[1];
  const T& px = qp[3];
  const T& py = qp[4];
  const T& pz = qp[5];
  T f = T(1.0) + T(beta) * x;
  if (primal(f) == 0.0) throw NumericalError("metric pole: 1 + beta*x vanished");
  T u = px + pz * y * y * 0.5;
  T w = py / f;
  return (u * u + w * w) * 0.5;
}

}  // namespace

double martinet_hamiltonian(const MartinetSystem& sys, const PhaseState& state) {
  double f = pole_factor(sys, state.q[0]);
  double u = state.p[0] + state.p[2] * state.q[1] * state.q[1] * 0.5;
  double w = state.p[1] / f;
  return 0.5 * (u * u + w * w);
}

std::pair<Vec, Vec> martinet_rhs(const MartinetSystem& sys, const PhaseState& state) {
  double x = state.q[0], y = state.q[1];
  double px = state.p[0], py = state.p[1], pz = state.p[2];
  double f = pole_factor(sys, x);
  double u = px + pz * y * y * 0.5;

  Vec qdot(3), pdot(3);
  qdot[0] = u;
  qdot[1] = py / (f * f);
  qdot[2] = u * y * y * 0.5;
  pdot[0] = sys.beta * py * py / (f * f * f);
  pdot[1] = -u * pz * y;
  pdot[2] = 0.0;
  return {qdot, pdot};
}

TangentState fiber_derivative(const MartinetSystem& sys, const PhaseState& state) {
  auto [qdot, pdot] = martinet_rhs(sys, state);
  return {state.q, qdot};
}

double recovered_lagrangian(const MartinetSystem& sys, const PhaseState& state) {
  auto [qdot, pdot] = martinet_rhs(sys, state);
  return state.p.dot(qdot) - martinet_hamiltonian(sys, state);
}

double martinet_lagrangian(const MartinetSystem& sys, const Vec& q, double vx, double vy) {
  double f = pole_factor(sys, q[0]);
  return 0.5 * (vx * vx + f * f * vy * vy);
}

MartinetDiscreteLagrangian martinet_discrete_lagrangian(const MartinetSystem& sys, const Vec& q0,
                                                        const Vec& q1, double h) {
  if (h <= 0.0) throw ValidationError("discrete step requires h > 0");
  double dx = q1[0] - q0[0];
  double dy = q1[1] - q0[1];
  double dz = q1[2] - q0[2];
  double residual = dz - 0.5 * q0[1] * q0[1] * dx;
  if (std::abs(residual) > 1e-8)
    throw ValidationError("configuration pair violates the discrete constraint by " +
                          std::to_string(residual) + " (tolerance 1e-8)");

  // Invert the position equations of the step for the arrival momentum. The
  // constrained direction of p is immaterial (the generating value is
  // constant along it), so pz is fixed to zero.
  double f = pole_factor(sys, q0[0]);
  Vec p1(3);
  p1[2] = 0.0;
  p1[0] = dx / h - p1[2] * q0[1] * q0[1] * 0.5;
  p1[1] = dy / h * (f * f);

  PhaseState probe{q0, p1};
  auto [qdot, pdot] = martinet_rhs(sys, probe);
  double s = h * (p1.dot(qdot) - martinet_hamiltonian(sys, probe));
  return {s, residual};
}

MartinetVerletSubsteps martinet_verlet_substeps(const MartinetSystem& sys, const PhaseState& s,
                                                double h, const NewtonConfig& cfg) {
  MartinetHamiltonian ham(sys);
  VerletStages stages = stormer_verlet_stages(ham, s, h, cfg);

  const Vec& ph = stages.half.p;
  const Vec& qh = stages.half.q;
  const Vec& q1 = stages.full.q;

  MartinetVerletSubsteps out;
  out.half = stages.half;
  out.full = stages.full;
  out.ld_plus = ph.dot(qh - s.q) - 0.5 * h * martinet_hamiltonian(sys, {s.q, ph});
  out.ld_minus = ph.dot(q1 - qh) - 0.5 * h * martinet_hamiltonian(sys, {q1, ph});
  out.residual_first = (qh[2] - s.q[2]) - 0.5 * s.q[1] * s.q[1] * (qh[0] - s.q[0]);
  out.residual_second = (q1[2] - qh[2]) - 0.5 * q1[1] * q1[1] * (q1[0] - qh[0]);
  return out;
}

double MartinetHamiltonian::value(const Vec& q, const Vec& p) const {
  return martinet_hamiltonian(sys_, {q, p});
}

void MartinetHamiltonian::gradient(const Vec& q, const Vec& p, Vec& dq, Vec& dp) const {
  auto [qdot, pdot] = martinet_rhs(sys_, {q, p});
  dp = qdot;
  dq = -pdot;
}

void MartinetHamiltonian::hessian(const Vec& q, const Vec& p, Mat& qq, Mat& qp, Mat& pp) const {
  Vec packed(6);
  packed << q, p;
  double beta = sys_.beta;
  Mat full = fn_hessian(
      [beta](const auto& z) {
        using T = std::decay_t<decltype(z[0])>;
        return martinet_packed<T>(beta, z);
      },
      packed);
  split_hessian_blocks(full, 3, qq, qp, pp);
}

}  // namespace geomint
