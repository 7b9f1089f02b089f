#include "geomint/continuous.hpp"

#include <Eigen/Cholesky>

namespace geomint {

namespace {

std::span<const double> as_span(const Vec& q) {
  return {q.data(), static_cast<std::size_t>(q.size())};
}

}  // namespace

Vec constraint_values(const LinearConstraintSystem& sys, const Vec& q, const Vec& v) {
  Mat gam_coef = gamma_at(sys, q);
  Vec vfree = gather(v, sys.split.free);
  Vec vcon = gather(v, sys.split.constrained);
  return vcon - gam_coef * vfree;
}

std::pair<Vec, Vec> hamiltonian_rhs(const LinearConstraintSystem& sys, const PhaseState& state) {
  HamiltonianGradient g = hamiltonian_gradient(sys, state);
  return {g.dp, Vec(-g.dq)};
}

VakonomicRhs vakonomic_rhs(const LinearConstraintSystem& sys, const ExtendedVakState& s) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  auto qs = as_span(s.q);

  ReducedMetric rm = reduced_metric(sys, s.q);
  Mat gam_coef = gamma_at(sys, s.q);
  Vec grad_v = potential_gradient(sys, s.q);

  VakonomicRhs out;
  out.qdot = Vec::Zero(n);
  scatter(out.qdot, sys.split.free, s.vfree);
  scatter(out.qdot, sys.split.constrained, gam_coef * s.vfree);

  // dGamma(i) has entry (alpha, a) = d Gamma^alpha_a / dq^i
  std::vector<Mat> dgam(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dgam[static_cast<std::size_t>(i)] = Mat(k, nf);
    for (int al = 0; al < k; ++al)
      for (int a = 0; a < nf; ++a)
        dgam[static_cast<std::size_t>(i)](al, a) = sys.gamma_entry(al, a).diff(qs, i);
  }

  out.pcondot = Vec(k);
  for (int be = 0; be < k; ++be) {
    int i = sys.split.constrained[be];
    double val = 0.5 * s.vfree.dot(rm.dgamma[static_cast<std::size_t>(i)] * s.vfree) - grad_v[i];
    val -= s.pcon.dot(dgam[static_cast<std::size_t>(i)] * s.vfree);
    out.pcondot[be] = val;
  }

  // gamma * vfreedot = rhs, assembled from the time derivative of the free
  // momentum balance
  Vec rhs(nf);
  for (int a = 0; a < nf; ++a) {
    int ia = sys.split.free[a];
    double val = 0.5 * s.vfree.dot(rm.dgamma[static_cast<std::size_t>(ia)] * s.vfree) - grad_v[ia];
    val -= s.pcon.dot(dgam[static_cast<std::size_t>(ia)] * s.vfree);
    for (int i = 0; i < n; ++i) {
      val -= out.qdot[i] * (rm.dgamma[static_cast<std::size_t>(i)].row(a).dot(s.vfree));
      val += out.qdot[i] * s.pcon.dot(dgam[static_cast<std::size_t>(i)].col(a));
    }
    val += out.pcondot.dot(gam_coef.col(a));
    rhs[a] = val;
  }
  Eigen::LLT<Mat> llt(rm.gamma);
  if (llt.info() != Eigen::Success) throw NumericalError("regularity failure: reduced metric singular");
  out.vfreedot = llt.solve(rhs);
  return out;
}

void require_admissible(const LinearConstraintSystem& sys, const TangentState& s) {
  if (sys.k() == 0) return;
  Vec phi = constraint_values(sys, s.q, s.v);
  if (phi.cwiseAbs().maxCoeff() > kConstraintAdmissionTol)
    throw ValidationError("state violates the constraints by " +
                          std::to_string(phi.cwiseAbs().maxCoeff()) +
                          " (admission tolerance 1e-8); fix the initial velocity");
}

NonholonomicRhs nonholonomic_rhs(const LinearConstraintSystem& sys, const TangentState& s) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  auto qs = as_span(s.q);

  Mat g = metric_at(sys, s.q);
  Mat gam_coef = gamma_at(sys, s.q);

  // F_i = 1/2 d_i g_jk v^j v^k - (d_k g_ij v^k) v^j - d_i V
  Vec force(n);
  Vec grad_v = potential_gradient(sys, s.q);
  for (int i = 0; i < n; ++i) {
    double quad = 0.0;
    double drag = 0.0;
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk) {
        quad += sys.metric_entry(j, kk).diff(qs, i) * s.v[j] * s.v[kk];
        drag += sys.metric_entry(i, j).diff(qs, kk) * s.v[kk] * s.v[j];
      }
    force[i] = 0.5 * quad - drag - grad_v[i];
  }

  // A^alpha_i: identity on the constrained block, -Gamma on the free block
  Mat a_mat = Mat::Zero(k, n);
  for (int al = 0; al < k; ++al) {
    a_mat(al, sys.split.constrained[al]) = 1.0;
    for (int a = 0; a < nf; ++a) a_mat(al, sys.split.free[a]) = -gam_coef(al, a);
  }

  // b^alpha = d_j Gamma^alpha_a v^j v^a  (so that A vdot = b keeps phi = 0)
  Vec b = Vec::Zero(k);
  Vec vfree = gather(s.v, sys.split.free);
  for (int al = 0; al < k; ++al)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < nf; ++a)
        b[al] += sys.gamma_entry(al, a).diff(qs, j) * s.v[j] * vfree[a];

  Eigen::LLT<Mat> gllt(g);
  if (gllt.info() != Eigen::Success) throw NumericalError("metric not SPD in nonholonomic solve");
  Mat ginv_at = gllt.solve(a_mat.transpose());
  Vec ginv_f = gllt.solve(force);

  NonholonomicRhs out;
  if (k > 0) {
    Mat mult = a_mat * ginv_at;
    Eigen::LLT<Mat> mllt(mult);
    if (mllt.info() != Eigen::Success)
      throw NumericalError("singular multiplier matrix in nonholonomic solve");
    out.lambda = mllt.solve(b - a_mat * ginv_f);
  } else {
    out.lambda = Vec(0);
  }
  out.vdot = ginv_f + ginv_at * out.lambda;
  return out;
}

Vec rk4_step(const OdeField& field, const Vec& y, double h) {
  Vec k1 = field.f(y);
  Vec k2 = field.f(y + 0.5 * h * k1);
  Vec k3 = field.f(y + 0.5 * h * k2);
  Vec k4 = field.f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory oracle_integrate(const OdeField& field, const Vec& y0, double h, int steps,
                            std::vector<std::pair<std::string, int>> blocks) {
  if (h <= 0.0) throw ValidationError("oracle_integrate requires h > 0");
  if (blocks.empty()) blocks = {{"state", field.dim}};
  Trajectory traj(std::move(blocks));
  if (traj.width() != field.dim)
    throw ValidationError("trajectory layout width does not match field dimension");
  Vec y = y0;
  traj.append(0.0, y);
  for (int s = 0; s < steps; ++s) {
    y = rk4_step(field, y, h);
    if (!y.allFinite())
      throw NumericalError("non-finite state at step " + std::to_string(s + 1));
    traj.append(h * (s + 1), y);
  }
  return traj;
}

Vec pack_phase(const PhaseState& s) {
  Vec y(s.q.size() + s.p.size());
  y << s.q, s.p;
  return y;
}

PhaseState unpack_phase(const Vec& y, int n) { return {y.head(n), y.tail(n)}; }

Vec pack_vak(const ExtendedVakState& s) {
  Vec y(s.q.size() + s.vfree.size() + s.pcon.size());
  y << s.q, s.vfree, s.pcon;
  return y;
}

ExtendedVakState unpack_vak(const Vec& y, const IndexSplit& split) {
  const int n = split.n;
  const int nf = split.num_free();
  const int k = split.num_constrained();
  return {y.head(n), y.segment(n, nf), y.tail(k)};
}

Vec pack_tangent(const TangentState& s) {
  Vec y(s.q.size() + s.v.size());
  y << s.q, s.v;
  return y;
}

TangentState unpack_tangent(const Vec& y, int n) { return {y.head(n), y.tail(n)}; }

OdeField hamiltonian_field(const LinearConstraintSystem& sys) {
  const int n = sys.n();
  return {2 * n, [sys, n](const Vec& y) {
            auto [qdot, pdot] = hamiltonian_rhs(sys, unpack_phase(y, n));
            Vec out(2 * n);
            out << qdot, pdot;
            return out;
          }};
}

OdeField hamiltonian_field(const HamiltonianSystem& h) {
  const int n = h.dim();
  return {2 * n, [&h, n](const Vec& y) {
            PhaseState s = unpack_phase(y, n);
            Vec dq(n), dp(n);
            h.gradient(s.q, s.p, dq, dp);
            Vec out(2 * n);
            out << dp, -dq;
            return out;
          }};
}

OdeField vakonomic_field(const LinearConstraintSystem& sys) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  IndexSplit split = sys.split;
  return {n + nf + k, [sys, split](const Vec& y) {
            VakonomicRhs r = vakonomic_rhs(sys, unpack_vak(y, split));
            Vec out(y.size());
            out << r.qdot, r.vfreedot, r.pcondot;
            return out;
          }};
}

OdeField nonholonomic_field(const LinearConstraintSystem& sys) {
  const int n = sys.n();
  return {2 * n, [sys, n](const Vec& y) {
            TangentState s = unpack_tangent(y, n);
            NonholonomicRhs r = nonholonomic_rhs(sys, s);
            Vec out(2 * n);
            out << s.v, r.vdot;
            return out;
          }};
}

std::pair<Vec, Vec> legendre_pushforward_rate(const LinearConstraintSystem& sys,
                                              const ExtendedVakState& s) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  auto qs = as_span(s.q);

  VakonomicRhs r = vakonomic_rhs(sys, s);
  ReducedMetric rm = reduced_metric(sys, s.q);
  Mat gam_coef = gamma_at(sys, s.q);

  Vec pfree_dot(nf);
  for (int a = 0; a < nf; ++a) {
    double val = rm.gamma.row(a).dot(r.vfreedot);
    for (int i = 0; i < n; ++i)
      val += r.qdot[i] * rm.dgamma[static_cast<std::size_t>(i)].row(a).dot(s.vfree);
    val -= r.pcondot.dot(gam_coef.col(a));
    for (int al = 0; al < k; ++al)
      for (int i = 0; i < n; ++i)
        val -= s.pcon[al] * sys.gamma_entry(al, a).diff(qs, i) * r.qdot[i];
    pfree_dot[a] = val;
  }
  Vec pdot = Vec::Zero(n);
  scatter(pdot, sys.split.free, pfree_dot);
  scatter(pdot, sys.split.constrained, r.pcondot);
  return {r.qdot, pdot};
}

}  // namespace geomint
