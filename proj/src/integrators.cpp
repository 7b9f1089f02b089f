#include "geomint/integrators.hpp"

namespace geomint {

namespace {

void check_step(double step) {
  if (step == 0.0) throw ValidationError("integrator step must be nonzero");
}

}  // namespace

PhaseState symplectic_euler_step(const HamiltonianSystem& h, const PhaseState& s, double step,
                                 const NewtonConfig& cfg) {
  check_step(step);
  const int n = h.dim();
  ImplicitProblem prob;
  prob.residual = [&, step](const Vec& p1) {
    Vec dq(n), dp(n);
    h.gradient(s.q, p1, dq, dp);
    return Vec(p1 - s.p + step * dq);
  };
  prob.jacobian = [&, step](const Vec& p1) {
    Mat qq(n, n), qp(n, n), pp(n, n);
    h.hessian(s.q, p1, qq, qp, pp);
    return Mat(Mat::Identity(n, n) + step * qp);
  };
  Vec dq0(n), dp0(n);
  h.gradient(s.q, s.p, dq0, dp0);
  Vec p1 = solve_implicit(prob, s.p - step * dq0, cfg);
  Vec dq(n), dp(n);
  h.gradient(s.q, p1, dq, dp);
  return {s.q + step * dp, p1};
}

PhaseState symplectic_euler_adjoint_step(const HamiltonianSystem& h, const PhaseState& s,
                                         double step, const NewtonConfig& cfg) {
  check_step(step);
  const int n = h.dim();
  ImplicitProblem prob;
  prob.residual = [&, step](const Vec& q1) {
    Vec dq(n), dp(n);
    h.gradient(q1, s.p, dq, dp);
    return Vec(q1 - s.q - step * dp);
  };
  prob.jacobian = [&, step](const Vec& q1) {
    Mat qq(n, n), qp(n, n), pp(n, n);
    h.hessian(q1, s.p, qq, qp, pp);
    return Mat(Mat::Identity(n, n) - step * qp.transpose());
  };
  Vec dq0(n), dp0(n);
  h.gradient(s.q, s.p, dq0, dp0);
  Vec q1 = solve_implicit(prob, s.q + step * dp0, cfg);
  Vec dq(n), dp(n);
  h.gradient(q1, s.p, dq, dp);
  return {q1, s.p - step * dq};
}

PhaseState midpoint_step(const HamiltonianSystem& h, const PhaseState& s, double step,
                         const NewtonConfig& cfg) {
  check_step(step);
  const int n = h.dim();
  ImplicitProblem prob;
  prob.residual = [&, step](const Vec& z) {
    Vec qm = 0.5 * (s.q + z.head(n));
    Vec pm = 0.5 * (s.p + z.tail(n));
    Vec dq(n), dp(n);
    h.gradient(qm, pm, dq, dp);
    Vec r(2 * n);
    r.head(n) = z.head(n) - s.q - step * dp;
    r.tail(n) = z.tail(n) - s.p + step * dq;
    return r;
  };
  prob.jacobian = [&, step](const Vec& z) {
    Vec qm = 0.5 * (s.q + z.head(n));
    Vec pm = 0.5 * (s.p + z.tail(n));
    Mat qq(n, n), qp(n, n), pp(n, n);
    h.hessian(qm, pm, qq, qp, pp);
    Mat j(2 * n, 2 * n);
    j.topLeftCorner(n, n) = Mat::Identity(n, n) - 0.5 * step * qp.transpose();
    j.topRightCorner(n, n) = -0.5 * step * pp;
    j.bottomLeftCorner(n, n) = 0.5 * step * qq;
    j.bottomRightCorner(n, n) = Mat::Identity(n, n) + 0.5 * step * qp;
    return j;
  };
  Vec dq0(n), dp0(n);
  h.gradient(s.q, s.p, dq0, dp0);
  Vec guess(2 * n);
  guess.head(n) = s.q + step * dp0;
  guess.tail(n) = s.p - step * dq0;
  Vec z = solve_implicit(prob, guess, cfg);
  return {z.head(n), z.tail(n)};
}

VerletStages stormer_verlet_stages(const HamiltonianSystem& h, const PhaseState& s, double step,
                                   const NewtonConfig& cfg) {
  check_step(step);
  const int n = h.dim();
  const double hh = 0.5 * step;

  // momentum half-kick, implicit in p_half
  ImplicitProblem kick;
  kick.residual = [&, hh](const Vec& ph) {
    Vec dq(n), dp(n);
    h.gradient(s.q, ph, dq, dp);
    return Vec(ph - s.p + hh * dq);
  };
  kick.jacobian = [&, hh](const Vec& ph) {
    Mat qq(n, n), qp(n, n), pp(n, n);
    h.hessian(s.q, ph, qq, qp, pp);
    return Mat(Mat::Identity(n, n) + hh * qp);
  };
  Vec dq0(n), dp0(n);
  h.gradient(s.q, s.p, dq0, dp0);
  Vec p_half = solve_implicit(kick, s.p - hh * dq0, cfg);

  // position full update averaging the fiber velocity at both ends,
  // implicit in q1
  Vec dq_a(n), dp_a(n);
  h.gradient(s.q, p_half, dq_a, dp_a);
  ImplicitProblem drift;
  drift.residual = [&, hh](const Vec& q1) {
    Vec dq(n), dp(n);
    h.gradient(q1, p_half, dq, dp);
    return Vec(q1 - s.q - hh * (dp_a + dp));
  };
  drift.jacobian = [&, hh](const Vec& q1) {
    Mat qq(n, n), qp(n, n), pp(n, n);
    h.hessian(q1, p_half, qq, qp, pp);
    return Mat(Mat::Identity(n, n) - hh * qp.transpose());
  };
  Vec q1 = solve_implicit(drift, s.q + step * dp_a, cfg);

  Vec dq1(n), dp1(n);
  h.gradient(q1, p_half, dq1, dp1);
  VerletStages out;
  out.half = {s.q + hh * dp_a, p_half};
  out.full = {q1, p_half - hh * dq1};
  return out;
}

PhaseState stormer_verlet_step(const HamiltonianSystem& h, const PhaseState& s, double step,
                               const NewtonConfig& cfg) {
  return stormer_verlet_stages(h, s, step, cfg).full;
}

PhaseState explicit_euler_step(const HamiltonianSystem& h, const PhaseState& s, double step) {
  check_step(step);
  const int n = h.dim();
  Vec dq(n), dp(n);
  h.gradient(s.q, s.p, dq, dp);
  return {s.q + step * dp, s.p - step * dq};
}

}  // namespace geomint
